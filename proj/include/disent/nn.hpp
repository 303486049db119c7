#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disent/matrix.hpp"

namespace disent::nn {

enum class Activation : uint8_t { Relu = 0, Logistic = 1 };

struct LayerSpec {
    int in_dim = 0;
    int out_dim = 0;
    Activation activation = Activation::Relu;
};

struct Layer {
    Matrix weight;             // out_dim x in_dim
    std::vector<double> bias;  // out_dim
    Activation activation = Activation::Relu;
    int in_dim() const { return weight.cols(); }
    int out_dim() const { return weight.rows(); }
};

// Mirror-MLP autoencoder parameters. activations()[latent_index] of a forward
// trace is the latent code z.
struct ModelParams {
    std::vector<Layer> layers;
    int latent_index = 0;
    uint64_t rng_seed = 0;
    int epoch = 0;  // completed training epochs, for checkpoint bookkeeping

    int input_dim() const { return layers.front().in_dim(); }
    int latent_dim() const { return layers[latent_index - 1].out_dim(); }
    size_t parameter_count() const;
};

// Per-layer activations a0 = x, a1, ..., aL = reconstruction.
struct ForwardTrace {
    std::vector<Matrix> activations;
    const Matrix& reconstruction() const { return activations.back(); }
};

struct LayerGrads {
    Matrix weight;
    std::vector<double> bias;
};

using Gradients = std::vector<LayerGrads>;

// Extra dL/da term injected at a trace activation (the neighborhood loss
// attaches here); merged into the flowing gradient during backward.
struct ActivationGrad {
    int trace_index = 0;
    Matrix grad;
};

// Encoder hidden widths used throughout: d-500-500-2000-c-2000-500-500-d.
std::vector<LayerSpec> autoencoder_spec(int d, int c,
                                        const std::vector<int>& encoder_hidden = {500, 500, 2000});

// He-initialized parameters (weights ~ N(0, 2/fan_in), zero biases).
ModelParams init_params(const std::vector<LayerSpec>& specs, int latent_index, uint64_t seed);

ModelParams build_autoencoder(int d, int c, uint64_t seed);

ForwardTrace forward(const ModelParams& params, const Matrix& x);

// Exact reverse-mode gradients of (loss with given output gradient + any
// injected per-activation losses) w.r.t. every weight and bias.
Gradients backward(const ModelParams& params, const ForwardTrace& trace,
                   const Matrix& output_grad, const std::vector<ActivationGrad>& extra = {});

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int64_t step = 0;
    std::vector<Matrix> m_weight, v_weight;
    std::vector<std::vector<double>> m_bias, v_bias;
};

AdamState make_adam_state(const ModelParams& params, double lr = 1e-3);

// Bias-corrected Adam update; throws NumericError on non-finite gradients.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

// Latent codes for a whole matrix, computed in row chunks.
Matrix encode(const ModelParams& params, const Matrix& x, int chunk = 512);

// Versioned binary checkpoint: layer dims, activations, weights (row-major),
// biases, RNG seed, epoch counter.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace disent::nn
