#pragma once

#include <string>
#include <vector>

#include "disent/matrix.hpp"
#include "disent/nn.hpp"

namespace disent::losses {

struct ValueGrad {
    double value = 0.0;
    Matrix grad;
};

// Mean binary cross entropy over all b*d elements; gradient w.r.t. r.
// r must be clamped away from {0,1} (the forward pass guarantees this).
ValueGrad bce_loss(const Matrix& x, const Matrix& r);

enum class TemperatureMode { Fixed, Annealing };

// Annealing temperature T = 1/(eta + epoch)^gamma; epochs are zero-indexed so
// training starts at T = 1 with the default eta = 1.
struct TemperatureSchedule {
    TemperatureMode mode = TemperatureMode::Fixed;
    double fixed_T = 1.0;
    double eta = 1.0;
    double gamma = 0.55;

    static TemperatureSchedule fixed(double T) {
        return {TemperatureMode::Fixed, T, 1.0, 0.55};
    }
    static TemperatureSchedule annealing(double eta = 1.0, double gamma = 0.55) {
        return {TemperatureMode::Annealing, 1.0, eta, gamma};
    }
};

double temperature(const TemperatureSchedule& schedule, int epoch);

// Soft nearest neighbor loss over a batch of row vectors at temperature T,
// with pairwise distance 1 - cosine_similarity. Rows whose positive set is
// empty are excluded from the average; throws UndefinedValueError when every
// row is excluded. Returns the exact gradient w.r.t. acts.
ValueGrad snnl(const Matrix& acts, const std::vector<int>& labels, double T);

// Unsupervised variant: the positive of row i is its single nearest neighbor
// in raw input space (cosine distance, ties to the lowest index).
ValueGrad snnl_unsupervised(const Matrix& acts, const Matrix& raw_inputs, double T);

std::vector<int> nearest_input_neighbors(const Matrix& raw_inputs);

// Shared core used by both variants; positives[i] lists the candidate
// neighbor rows treated as same-structure for row i.
ValueGrad snnl_with_positives(const Matrix& acts, const std::vector<std::vector<int>>& positives,
                              double T);

enum class LayerMode { Sum, Argmin };

// One row of the configuration lookup table: which SNNL variant regularizes
// the autoencoder. Shorthands: "baseline-ae", "snnl-1" .. "snnl-8"
// (odd = supervised, even = unsupervised; 1-4 fixed T, 5-8 annealing;
// 3,4,7,8 take only the lowest per-layer loss each step).
struct LossConfig {
    bool use_snnl = true;
    bool supervised = true;
    LayerMode layer_mode = LayerMode::Sum;
    TemperatureSchedule schedule;
    double alpha = 100.0;
    std::vector<int> snnl_layers = {1, 2, 3, 4};  // trace indices: encoder path + code

    static LossConfig baseline();
    static LossConfig from_shorthand(const std::string& name);
    std::string shorthand() const;
};

struct LossReport {
    double total = 0.0;
    double reconstruction = 0.0;
    std::vector<double> snnl_per_layer;  // aligned with config.snnl_layers
    double snnl_aggregate = 0.0;         // sum or argmin value, per layer_mode
    int chosen_layer = -1;               // trace index picked in argmin mode
    double temperature_used = 0.0;
};

struct CompositeResult {
    LossReport report;
    Matrix output_grad;                           // dL/d reconstruction
    std::vector<nn::ActivationGrad> layer_grads;  // alpha-scaled SNNL gradients
};

// Composite objective: reconstruction + alpha * aggregated SNNL over the
// configured layers, evaluated on a forward trace.
CompositeResult composite_loss(const LossConfig& config, const nn::ForwardTrace& trace,
                               const Matrix& x, const std::vector<int>& labels, int epoch);

}  // namespace disent::losses
