#include "disent/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disent/errors.hpp"
#include "disent/kernels.hpp"

namespace disent::losses {

namespace {
// Guard inside the outer logs; keeps tiny numerators finite at low T.
constexpr double kLogEps = 1e-9;
}

ValueGrad bce_loss(const Matrix& x, const Matrix& r) {
    if (!x.same_shape(r)) throw ArgumentError("bce_loss: shape mismatch");
    const int n = r.rows(), m = r.cols();
    const double scale = 1.0 / (double(n) * double(m));
    ValueGrad out;
    out.grad.resize(n, m);
    std::vector<double> row_sums(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        const double* ri = r.row(i);
        double* gi = out.grad.row(i);
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            sum -= xi[j] * std::log(ri[j]) + (1.0 - xi[j]) * std::log(1.0 - ri[j]);
            gi[j] = scale * (ri[j] - xi[j]) / (ri[j] * (1.0 - ri[j]));
        }
        row_sums[i] = sum;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    out.value = total * scale;
    return out;
}

double temperature(const TemperatureSchedule& schedule, int epoch) {
    if (epoch < 0) throw ArgumentError("temperature: epoch must be >= 0");
    if (schedule.mode == TemperatureMode::Fixed) return schedule.fixed_T;
    return std::pow(schedule.eta + double(epoch), -schedule.gamma);
}

std::vector<int> nearest_input_neighbors(const Matrix& raw_inputs) {
    const int b = raw_inputs.rows();
    if (b < 2) throw ArgumentError("nearest_input_neighbors: need at least 2 rows");
    Matrix dist;
    std::vector<double> inv_norms;
    kernels::pairwise_cosine_distance(raw_inputs, dist, inv_norms);
    std::vector<int> nn(b, -1);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < b; ++i) {
        const double* drow = dist.row(i);
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (int j = 0; j < b; ++j) {
            if (j == i) continue;
            if (drow[j] < best) {
                best = drow[j];
                best_j = j;
            }
        }
        nn[i] = best_j;
    }
    return nn;
}

ValueGrad snnl_with_positives(const Matrix& acts, const std::vector<std::vector<int>>& positives,
                              double T) {
    const int b = acts.rows();
    const int m = acts.cols();
    if (b < 2) throw ArgumentError("snnl: batch must have at least 2 rows");
    if (int(positives.size()) != b) throw ArgumentError("snnl: positives size mismatch");
    if (!(T > 0.0)) throw ArgumentError("snnl: temperature must be positive");

    Matrix dist;
    std::vector<double> inv_norms;
    kernels::pairwise_cosine_distance(acts, dist, inv_norms);

    // Per-row log-sum-exp with max subtraction; w(i,k) = exp((-d_ik + M_i)/T).
    Matrix w(b, b);
    std::vector<double> row_value(b, 0.0);
    std::vector<char> row_active(b, 0);
    std::vector<double> sd(b, 0.0), sn(b, 0.0);
    std::vector<int> arg_max(b, -1);
    Matrix g(b, b);  // d(per-row value)/dE, unscaled by 1/b'

#pragma omp parallel for schedule(static)
    for (int i = 0; i < b; ++i) {
        if (positives[i].empty()) continue;
        const double* drow = dist.row(i);
        double* wrow = w.row(i);
        double max_e = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int k = 0; k < b; ++k) {
            if (k == i) continue;
            const double e = -drow[k] / T;
            if (e > max_e) {
                max_e = e;
                arg = k;
            }
        }
        double den = 0.0;
        for (int k = 0; k < b; ++k)
            wrow[k] = k == i ? 0.0 : std::exp(-drow[k] / T - max_e);
        for (int k = 0; k < b; ++k) den += wrow[k];
        double num = 0.0;
        for (int j : positives[i]) num += wrow[j];

        row_active[i] = 1;
        arg_max[i] = arg;
        sd[i] = den / (den + kLogEps);
        sn[i] = num / (num + kLogEps);
        row_value[i] = std::log(den + kLogEps) - std::log(num + kLogEps);

        double* grow = g.row(i);
        const double inv_den = 1.0 / (den + kLogEps);
        const double inv_num = 1.0 / (num + kLogEps);
        for (int k = 0; k < b; ++k) grow[k] = wrow[k] * inv_den;
        for (int j : positives[i]) grow[j] -= wrow[j] * inv_num;
        grow[arg] -= sd[i] - sn[i];
    }

    int active = 0;
    double value = 0.0;
    for (int i = 0; i < b; ++i) {
        if (!row_active[i]) continue;
        ++active;
        value += row_value[i];
    }
    if (active == 0)
        throw UndefinedValueError("snnl: no row has a candidate neighbor in this batch");
    const double inv_active = 1.0 / double(active);
    value *= inv_active;

    // Chain rule through d_ik = 1 - cos(x_i, x_k):
    //   dL/dx_p = inv_p * sum_l S(p,l) inv_l x_l - inv_p^2 (sum_l S(p,l) cos_pl) x_p
    // with S(p,l) = (g(p,l) + g(l,p)) / (T * b').
    Matrix a(b, b);
    std::vector<double> cos_coeff(b, 0.0);
    const double scale = inv_active / T;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < b; ++p) {
        double* arow = a.row(p);
        const double* grow = g.row(p);
        const double* drow = dist.row(p);
        double coeff = 0.0;
        for (int l = 0; l < b; ++l) {
            const double s = (grow[l] + g(l, p)) * scale;
            arow[l] = s * inv_norms[l];
            coeff += s * (1.0 - drow[l]);
        }
        cos_coeff[p] = coeff;
    }

    ValueGrad out;
    out.value = value;
    kernels::matmul(a, acts, out.grad);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < b; ++p) {
        double* grad_row = out.grad.row(p);
        const double* xrow = acts.row(p);
        const double inv_p = inv_norms[p];
        const double c2 = inv_p * inv_p * cos_coeff[p];
        for (int t = 0; t < m; ++t) grad_row[t] = inv_p * grad_row[t] - c2 * xrow[t];
    }
    return out;
}

ValueGrad snnl(const Matrix& acts, const std::vector<int>& labels, double T) {
    const int b = acts.rows();
    if (int(labels.size()) != b) throw ArgumentError("snnl: labels size mismatch");
    std::vector<std::vector<int>> positives(b);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j)
            if (j != i && labels[j] == labels[i]) positives[i].push_back(j);
    return snnl_with_positives(acts, positives, T);
}

ValueGrad snnl_unsupervised(const Matrix& acts, const Matrix& raw_inputs, double T) {
    const int b = acts.rows();
    if (b < 3) throw ArgumentError("snnl_unsupervised: batch must have at least 3 rows");
    if (raw_inputs.rows() != b) throw ArgumentError("snnl_unsupervised: raw input rows mismatch");
    const auto nn = nearest_input_neighbors(raw_inputs);
    std::vector<std::vector<int>> positives(b);
    for (int i = 0; i < b; ++i) positives[i].push_back(nn[i]);
    return snnl_with_positives(acts, positives, T);
}

LossConfig LossConfig::baseline() {
    LossConfig config;
    config.use_snnl = false;
    return config;
}

LossConfig LossConfig::from_shorthand(const std::string& name) {
    if (name == "baseline-ae") return baseline();
    if (name.rfind("snnl-", 0) == 0 && name.size() == 6 && name[5] >= '1' && name[5] <= '8') {
        const int n = name[5] - '0';
        LossConfig config;
        config.use_snnl = true;
        config.supervised = n % 2 == 1;
        config.layer_mode = (n == 3 || n == 4 || n == 7 || n == 8) ? LayerMode::Argmin : LayerMode::Sum;
        config.schedule = n >= 5 ? TemperatureSchedule::annealing() : TemperatureSchedule::fixed(1.0);
        return config;
    }
    throw ArgumentError("unknown loss configuration: " + name +
                        " (expected baseline-ae or snnl-1..snnl-8)");
}

std::string LossConfig::shorthand() const {
    if (!use_snnl) return "baseline-ae";
    const bool annealing = schedule.mode == TemperatureMode::Annealing;
    const bool argmin = layer_mode == LayerMode::Argmin;
    int n = annealing ? 5 : 1;
    if (argmin) n += 2;
    if (!supervised) n += 1;
    return "snnl-" + std::to_string(n);
}

CompositeResult composite_loss(const LossConfig& config, const nn::ForwardTrace& trace,
                               const Matrix& x, const std::vector<int>& labels, int epoch) {
    const int n_layers = int(trace.activations.size()) - 1;
    CompositeResult result;

    ValueGrad rec = bce_loss(x, trace.reconstruction());
    result.report.reconstruction = rec.value;
    result.output_grad = std::move(rec.grad);

    if (!config.use_snnl) {
        result.report.total = rec.value;
        return result;
    }
    if (config.snnl_layers.empty()) throw ArgumentError("composite_loss: snnl_layers is empty");
    if (config.supervised && labels.empty())
        throw ArgumentError("composite_loss: supervised configuration needs labels");
    if (!(config.alpha >= 0.0)) throw ArgumentError("composite_loss: alpha must be non-negative");

    const double T = temperature(config.schedule, epoch);
    result.report.temperature_used = T;

    std::vector<std::vector<int>> positives;
    if (!config.supervised) {
        const auto nn_idx = nearest_input_neighbors(trace.activations.front());
        positives.resize(nn_idx.size());
        for (size_t i = 0; i < nn_idx.size(); ++i) positives[i].push_back(nn_idx[i]);
    } else {
        const int b = trace.activations.front().rows();
        positives.resize(b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                if (j != i && labels[j] == labels[i]) positives[i].push_back(j);
    }

    std::vector<ValueGrad> per_layer;
    per_layer.reserve(config.snnl_layers.size());
    for (int layer : config.snnl_layers) {
        if (layer < 1 || layer > n_layers)
            throw ArgumentError("composite_loss: snnl layer index out of range");
        per_layer.push_back(snnl_with_positives(trace.activations[layer], positives, T));
        result.report.snnl_per_layer.push_back(per_layer.back().value);
    }

    auto scale_grad = [&](Matrix&& grad) {
        double* d = grad.data();
        for (size_t i = 0; i < grad.size(); ++i) d[i] *= config.alpha;
        return std::move(grad);
    };

    if (config.layer_mode == LayerMode::Sum) {
        double total_snnl = 0.0;
        for (size_t i = 0; i < per_layer.size(); ++i) {
            total_snnl += per_layer[i].value;
            if (config.alpha != 0.0)
                result.layer_grads.push_back(
                    {config.snnl_layers[i], scale_grad(std::move(per_layer[i].grad))});
        }
        result.report.snnl_aggregate = total_snnl;
    } else {
        size_t best = 0;
        for (size_t i = 1; i < per_layer.size(); ++i)
            if (per_layer[i].value < per_layer[best].value) best = i;
        result.report.snnl_aggregate = per_layer[best].value;
        result.report.chosen_layer = config.snnl_layers[best];
        if (config.alpha != 0.0)
            result.layer_grads.push_back(
                {config.snnl_layers[best], scale_grad(std::move(per_layer[best].grad))});
    }

    result.report.total = result.report.reconstruction + config.alpha * result.report.snnl_aggregate;
    return result;
}

}  // namespace disent::losses
