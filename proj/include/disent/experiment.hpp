#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disent/cluster.hpp"
#include "disent/config.hpp"
#include "disent/dataio.hpp"
#include "disent/losses.hpp"
#include "disent/metrics.hpp"
#include "disent/nn.hpp"

namespace disent {

// ---------------------------------------------------------------------------
// datasets
// ---------------------------------------------------------------------------

// Axis-aligned Gaussian blobs in [0,1]^dim, one blob per class.
Dataset make_synthetic_blobs(int n, int classes, int dim, double spread, uint64_t seed);

// Resolves the configured dataset; split is "train" or "test".
Dataset load_configured_dataset(const ExperimentConfig& config, const std::string& split);

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

struct TrainOptions {
    int epochs = 50;
    int batch_size = 256;
    double learning_rate = 1e-3;
    int latent_dim = 70;
    std::vector<int> encoder_hidden = {500, 500, 2000};
    uint64_t seed = 1;
};

struct EpochLog {
    int epoch = 0;
    double temperature = 0.0;
    double reconstruction = 0.0;
    double snnl = 0.0;  // aggregated per the layer mode
    double total = 0.0;
};

struct TrainOutcome {
    nn::ModelParams params;
    std::vector<EpochLog> trace;
    bool diverged = false;
    std::string error;
    int skipped_batches = 0;  // batches where the neighborhood loss was undefined
};

TrainOutcome train_autoencoder(const Dataset& train, const losses::LossConfig& loss_config,
                               const TrainOptions& options);

std::string loss_trace_csv(const std::vector<EpochLog>& trace);

// ---------------------------------------------------------------------------
// embeddings on disk
// ---------------------------------------------------------------------------

// CSV header z0..z{c-1},label; values written at 32-bit precision; label -1
// when the dataset is unlabelled.
void write_embeddings_csv(const std::string& path, const Matrix& codes,
                          const std::vector<int>& labels);
Matrix read_embeddings_csv(const std::string& path, std::vector<int>* labels_out);

// Binary container (magic DEMB): float32 matrix plus optional labels.
void write_embeddings_bin(const std::string& path, const Matrix& codes,
                          const std::vector<int>& labels);
Matrix read_embeddings_bin(const std::string& path, std::vector<int>* labels_out);

// Dispatches on the ".bin" extension.
Matrix read_embeddings(const std::string& path, std::vector<int>* labels_out);

// ---------------------------------------------------------------------------
// experiment protocol
// ---------------------------------------------------------------------------

struct SeedOutcome {
    uint64_t seed = 0;
    bool failed = false;
    std::string error;
    metrics::MetricsReport metrics;
    std::string checkpoint_path;
    std::string embeddings_path;
    std::string loss_trace_path;
    double wall_seconds = 0.0;  // logged separately; never part of report files
};

struct AggregateReport {
    metrics::MetricsReport average;
    metrics::MetricsReport best;  // max per metric, except DBI where lower is better
    int successful_seeds = 0;
};

struct RunRecord {
    ExperimentConfig config;
    std::vector<SeedOutcome> per_seed;
    AggregateReport aggregate;
    double wall_seconds = 0.0;
};

// Full protocol per seed: train (or PCA-project), encode the test set, run
// the nine-run k-means protocol, score the ninth run with all six metrics.
// Writes report.json, report.csv, per-seed loss traces, embeddings and
// checkpoints under config.output_dir.
RunRecord run_experiment(const ExperimentConfig& config);

std::string report_json(const RunRecord& record);
std::string report_csv(const RunRecord& record);

// ---------------------------------------------------------------------------
// few-labels sweep
// ---------------------------------------------------------------------------

struct SweepEntry {
    int size = 0;
    RunRecord record;
};

struct SweepRecord {
    std::vector<SweepEntry> entries;
};

SweepRecord few_labels_sweep(const ExperimentConfig& base, const std::vector<int>& sizes);

std::string sweep_csv(const SweepRecord& sweep);

// ---------------------------------------------------------------------------
// synthetic Gaussian demo
// ---------------------------------------------------------------------------

// Gradient descent directly on 2-D point coordinates under the neighborhood
// loss, comparing the fixed and annealing temperature schedules.
struct DemoOptions {
    int n = 300;
    int classes = 4;
    int epochs = 50;
    int steps_per_epoch = 20;
    double learning_rate = 1.0;
    double fixed_temperature = 1.0;
    double eta = 1.0;
    double gamma = 0.55;
    uint64_t seed = 1;
    int snapshot_every = 10;
};

struct DemoSchedule {
    std::vector<double> loss;         // per epoch, 0..epochs inclusive
    std::vector<double> temperature;  // temperature used at each epoch
    std::vector<std::pair<int, Matrix>> snapshots;
    Matrix final_coords;
    double kmeans_accuracy = 0.0;
};

struct DemoResult {
    Matrix initial_coords;
    std::vector<int> labels;
    DemoSchedule fixed;
    DemoSchedule annealing;
};

DemoResult synthetic_gaussian_demo(const DemoOptions& options);

}  // namespace disent
