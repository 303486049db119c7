#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disent/losses.hpp"

namespace disent {

// One experiment: dataset x model x hyperparameters x seed list. Parsed from
// a flat key = value file; CLI flags override file values.
struct ExperimentConfig {
    std::string dataset = "synthetic-gaussian";  // mnist | fashion-mnist | emnist-balanced |
                                                 // synthetic-gaussian | csv
    std::string model = "snnl-5";                // original-pca | baseline-ae | snnl-1..snnl-8
    std::string data_dir;                        // empty: $DISENT_DATA_DIR, then ./data
    std::string output_dir = "runs/out";

    int labelled_subset_size = 10000;  // 0 = full training set
    bool subset_all_models = false;    // apply the subset to unsupervised/PCA models too

    int latent_dim = 70;
    int epochs = 50;
    int batch_size = 256;
    double learning_rate = 1e-3;

    double alpha = 100.0;
    double fixed_temperature = 1.0;
    double eta = 1.0;
    double gamma = 0.55;
    std::vector<int> snnl_layers = {1, 2, 3, 4};

    int clusters = 0;  // 0 = number of ground-truth classes
    std::vector<uint64_t> seeds = {1, 2, 3, 4};

    // synthetic-gaussian dataset knobs
    int synth_train = 2000;
    int synth_test = 1000;
    int synth_classes = 10;
    int synth_dim = 64;
    double synth_spread = 0.06;
    uint64_t synth_seed = 7;

    // csv dataset paths (feature columns + optional trailing "label" column)
    std::string csv_train;
    std::string csv_test;

    int sil_full_limit = 20000;
    int sil_sample_size = 10000;

    int repeats() const { return int(seeds.size()); }

    // Loss configuration implied by `model` plus the temperature/alpha knobs.
    losses::LossConfig loss_config() const;

    std::string resolved_data_dir() const;
    void validate() const;
};

ExperimentConfig parse_config_file(const std::string& path);

// Applies "key=value" to the config; throws ArgumentError on unknown keys.
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

std::string config_to_string(const ExperimentConfig& config);

}  // namespace disent
