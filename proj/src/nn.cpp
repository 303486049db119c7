#include "disent/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "disent/errors.hpp"
#include "disent/kernels.hpp"
#include "disent/rng.hpp"

namespace disent::nn {

namespace {

constexpr double kLogisticClamp = 1e-7;
constexpr char kCheckpointMagic[4] = {'D', 'S', 'N', 'T'};
constexpr uint32_t kCheckpointVersion = 1;

void apply_activation(Matrix& z, const std::vector<double>& bias, Activation act) {
    const int n = z.rows(), m = z.cols();
    const double* b = bias.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* row = z.row(i);
        if (act == Activation::Relu) {
            for (int j = 0; j < m; ++j) {
                const double v = row[j] + b[j];
                row[j] = v > 0.0 ? v : 0.0;
            }
        } else {
            for (int j = 0; j < m; ++j) {
                const double v = 1.0 / (1.0 + std::exp(-(row[j] + b[j])));
                row[j] = std::min(1.0 - kLogisticClamp, std::max(kLogisticClamp, v));
            }
        }
    }
}

// dz = g * act'(a) where a is the post-activation output.
void activation_backward(const Matrix& g, const Matrix& a, Activation act, Matrix& dz) {
    const int n = g.rows(), m = g.cols();
    dz.resize(n, m);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* grow = g.row(i);
        const double* arow = a.row(i);
        double* drow = dz.row(i);
        if (act == Activation::Relu) {
            for (int j = 0; j < m; ++j) drow[j] = arow[j] > 0.0 ? grow[j] : 0.0;
        } else {
            for (int j = 0; j < m; ++j) drow[j] = grow[j] * arow[j] * (1.0 - arow[j]);
        }
    }
}

void add_inplace(Matrix& dst, const Matrix& src) {
    if (!dst.same_shape(src)) throw ArgumentError("injected gradient shape mismatch");
    double* d = dst.data();
    const double* s = src.data();
    for (size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

}  // namespace

size_t ModelParams::parameter_count() const {
    size_t total = 0;
    for (const auto& layer : layers) total += layer.weight.size() + layer.bias.size();
    return total;
}

std::vector<LayerSpec> autoencoder_spec(int d, int c, const std::vector<int>& encoder_hidden) {
    if (d < 1 || c < 1) throw ArgumentError("autoencoder dims must be positive");
    std::vector<int> dims;
    dims.push_back(d);
    dims.insert(dims.end(), encoder_hidden.begin(), encoder_hidden.end());
    dims.push_back(c);
    for (auto it = encoder_hidden.rbegin(); it != encoder_hidden.rend(); ++it) dims.push_back(*it);
    dims.push_back(d);

    std::vector<LayerSpec> specs;
    const int latent_pos = int(encoder_hidden.size());  // layer index producing z
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        LayerSpec s;
        s.in_dim = dims[i];
        s.out_dim = dims[i + 1];
        // The c-latent layer and the reconstruction layer are logistic, all
        // other hidden layers ReLU.
        const bool logistic = int(i) == latent_pos || i + 2 == dims.size();
        s.activation = logistic ? Activation::Logistic : Activation::Relu;
        specs.push_back(s);
    }
    return specs;
}

ModelParams init_params(const std::vector<LayerSpec>& specs, int latent_index, uint64_t seed) {
    ModelParams params;
    params.latent_index = latent_index;
    params.rng_seed = seed;
    Rng rng(seed);
    for (const auto& spec : specs) {
        if (spec.in_dim < 1 || spec.out_dim < 1) throw ArgumentError("layer dims must be positive");
        Layer layer;
        layer.activation = spec.activation;
        layer.weight.resize(spec.out_dim, spec.in_dim);
        const double stddev = std::sqrt(2.0 / spec.in_dim);
        double* w = layer.weight.data();
        for (size_t i = 0; i < layer.weight.size(); ++i) w[i] = stddev * rng.normal();
        layer.bias.assign(spec.out_dim, 0.0);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

ModelParams build_autoencoder(int d, int c, uint64_t seed) {
    const auto specs = autoencoder_spec(d, c);
    return init_params(specs, 4, seed);
}

ForwardTrace forward(const ModelParams& params, const Matrix& x) {
    if (x.cols() != params.input_dim()) throw ArgumentError("forward: input width mismatch");
    if (!x.all_finite()) throw NumericError("forward: non-finite input");
    ForwardTrace trace;
    trace.activations.reserve(params.layers.size() + 1);
    trace.activations.push_back(x);
    for (const auto& layer : params.layers) {
        Matrix z;
        kernels::matmul_nt(trace.activations.back(), layer.weight, z);
        apply_activation(z, layer.bias, layer.activation);
        trace.activations.push_back(std::move(z));
    }
    return trace;
}

Gradients backward(const ModelParams& params, const ForwardTrace& trace,
                   const Matrix& output_grad, const std::vector<ActivationGrad>& extra) {
    const int n_layers = int(params.layers.size());
    if (int(trace.activations.size()) != n_layers + 1)
        throw ArgumentError("backward: trace does not match model");
    if (!output_grad.same_shape(trace.reconstruction()))
        throw ArgumentError("backward: output gradient shape mismatch");

    std::vector<const Matrix*> injected(n_layers + 1, nullptr);
    for (const auto& e : extra) {
        if (e.trace_index < 1 || e.trace_index > n_layers)
            throw ArgumentError("backward: injected gradient index out of range");
        if (!e.grad.same_shape(trace.activations[e.trace_index]))
            throw ArgumentError("backward: injected gradient shape mismatch");
        injected[e.trace_index] = &e.grad;
    }

    Gradients grads(n_layers);
    Matrix g = output_grad;
    if (injected[n_layers]) add_inplace(g, *injected[n_layers]);

    Matrix dz;
    for (int l = n_layers - 1; l >= 0; --l) {
        const Layer& layer = params.layers[l];
        activation_backward(g, trace.activations[l + 1], layer.activation, dz);
        kernels::matmul_tn(dz, trace.activations[l], grads[l].weight);
        kernels::colsum(dz, grads[l].bias);
        if (l > 0) {
            kernels::matmul(dz, layer.weight, g);
            if (injected[l]) add_inplace(g, *injected[l]);
        }
    }
    return grads;
}

AdamState make_adam_state(const ModelParams& params, double lr) {
    AdamState state;
    state.lr = lr;
    for (const auto& layer : params.layers) {
        state.m_weight.emplace_back(layer.weight.rows(), layer.weight.cols());
        state.v_weight.emplace_back(layer.weight.rows(), layer.weight.cols());
        state.m_bias.emplace_back(layer.bias.size(), 0.0);
        state.v_bias.emplace_back(layer.bias.size(), 0.0);
    }
    return state;
}

namespace {

void adam_update(double* w, const double* g, double* m, double* v, size_t count,
                 const AdamState& s, double bc1, double bc2) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < long(count); ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
    if (grads.size() != params.layers.size()) throw ArgumentError("adam_step: gradient count mismatch");
    for (size_t l = 0; l < grads.size(); ++l) {
        if (!grads[l].weight.same_shape(params.layers[l].weight) ||
            grads[l].bias.size() != params.layers[l].bias.size())
            throw ArgumentError("adam_step: gradient shape mismatch");
        if (!grads[l].weight.all_finite())
            throw NumericError("adam_step: non-finite weight gradient in layer " + std::to_string(l));
        for (double b : grads[l].bias)
            if (!std::isfinite(b))
                throw NumericError("adam_step: non-finite bias gradient in layer " + std::to_string(l));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
    for (size_t l = 0; l < grads.size(); ++l) {
        adam_update(params.layers[l].weight.data(), grads[l].weight.data(),
                    state.m_weight[l].data(), state.v_weight[l].data(),
                    params.layers[l].weight.size(), state, bc1, bc2);
        adam_update(params.layers[l].bias.data(), grads[l].bias.data(), state.m_bias[l].data(),
                    state.v_bias[l].data(), params.layers[l].bias.size(), state, bc1, bc2);
    }
}

Matrix encode(const ModelParams& params, const Matrix& x, int chunk) {
    const int n = x.rows();
    const int c = params.latent_dim();
    Matrix codes(n, c);
    for (int start = 0; start < n; start += chunk) {
        const int rows = std::min(chunk, n - start);
        Matrix part(rows, x.cols());
        for (int i = 0; i < rows; ++i) std::copy_n(x.row(start + i), x.cols(), part.row(i));
        ForwardTrace trace = forward(params, part);
        const Matrix& z = trace.activations[params.latent_index];
        for (int i = 0; i < rows; ++i) std::copy_n(z.row(i), c, codes.row(start + i));
    }
    return codes;
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write checkpoint: " + path);
    auto put_u32 = [&f](uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&f](uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    f.write(kCheckpointMagic, 4);
    put_u32(kCheckpointVersion);
    put_u32(uint32_t(params.layers.size()));
    put_u32(uint32_t(params.latent_index));
    put_u64(params.rng_seed);
    put_u32(uint32_t(params.epoch));
    for (const auto& layer : params.layers) {
        put_u32(uint32_t(layer.in_dim()));
        put_u32(uint32_t(layer.out_dim()));
        const uint8_t act = uint8_t(layer.activation);
        f.write(reinterpret_cast<const char*>(&act), 1);
    }
    for (const auto& layer : params.layers) {
        f.write(reinterpret_cast<const char*>(layer.weight.data()),
                std::streamsize(layer.weight.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(layer.bias.data()),
                std::streamsize(layer.bias.size() * sizeof(double)));
    }
    if (!f) throw FormatError("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw FormatError("bad checkpoint magic: " + path);
    auto get_u32 = [&f]() {
        uint32_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&f]() {
        uint64_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const uint32_t version = get_u32();
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
    ModelParams params;
    const uint32_t n_layers = get_u32();
    params.latent_index = int(get_u32());
    params.rng_seed = get_u64();
    params.epoch = int(get_u32());
    std::vector<std::pair<int, int>> dims;
    std::vector<Activation> acts;
    for (uint32_t l = 0; l < n_layers; ++l) {
        const int in = int(get_u32());
        const int out = int(get_u32());
        uint8_t act = 0;
        f.read(reinterpret_cast<char*>(&act), 1);
        dims.emplace_back(in, out);
        acts.push_back(Activation(act));
    }
    if (!f) throw FormatError("truncated checkpoint header: " + path);
    for (uint32_t l = 0; l < n_layers; ++l) {
        Layer layer;
        layer.activation = acts[l];
        layer.weight.resize(dims[l].second, dims[l].first);
        layer.bias.assign(size_t(dims[l].second), 0.0);
        f.read(reinterpret_cast<char*>(layer.weight.data()),
               std::streamsize(layer.weight.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(layer.bias.data()),
               std::streamsize(layer.bias.size() * sizeof(double)));
        params.layers.push_back(std::move(layer));
    }
    if (!f) throw FormatError("truncated checkpoint payload: " + path);
    return params;
}

}  // namespace disent::nn
