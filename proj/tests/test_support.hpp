#pragma once

// Shared test oracles: finite-difference gradient checking and small random
// model/batch generators. Test-only; the library never includes this.

#include <cmath>
#include <functional>
#include <vector>

#include "disent/matrix.hpp"
#include "disent/nn.hpp"
#include "disent/rng.hpp"

namespace disent::testsupport {

struct FdReport {
    double rel_error = 0.0;
    double analytic_norm = 0.0;
    double fd_norm = 0.0;
};

// Central finite differences over every weight and bias of the model;
// rel_error = ||g_analytic - g_fd|| / max(||g_analytic|| + ||g_fd||, 1e-12).
inline FdReport finite_diff_check(nn::ModelParams params, const nn::Gradients& analytic,
                                  const std::function<double(const nn::ModelParams&)>& loss,
                                  double h = 1e-5) {
    FdReport report;
    double diff_sq = 0.0, ana_sq = 0.0, fd_sq = 0.0;
    auto probe = [&](double& theta, double ana) {
        const double saved = theta;
        theta = saved + h;
        const double up = loss(params);
        theta = saved - h;
        const double down = loss(params);
        theta = saved;
        const double fd = (up - down) / (2.0 * h);
        diff_sq += (ana - fd) * (ana - fd);
        ana_sq += ana * ana;
        fd_sq += fd * fd;
    };
    for (size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        for (size_t i = 0; i < layer.weight.size(); ++i)
            probe(layer.weight.data()[i], analytic[l].weight.data()[i]);
        for (size_t i = 0; i < layer.bias.size(); ++i)
            probe(layer.bias[i], analytic[l].bias[i]);
    }
    report.analytic_norm = std::sqrt(ana_sq);
    report.fd_norm = std::sqrt(fd_sq);
    report.rel_error =
        std::sqrt(diff_sq) / std::max(report.analytic_norm + report.fd_norm, 1e-12);
    return report;
}

// Tiny mirror autoencoder with random hidden widths, for gradient checks.
inline nn::ModelParams random_tiny_autoencoder(int d, int c, Rng& rng) {
    std::vector<int> hidden(3);
    for (auto& width : hidden) width = 2 + int(rng.uniform_int(5));
    const auto specs = nn::autoencoder_spec(d, c, hidden);
    return nn::init_params(specs, int(hidden.size()) + 1, rng.next_u64());
}

// Batch with features in (0.05, 0.95) so BCE terms stay well-conditioned.
inline Matrix random_batch(int b, int d, Rng& rng) {
    Matrix x(b, d);
    for (size_t i = 0; i < x.size(); ++i) x.data()[i] = 0.05 + 0.9 * rng.uniform();
    return x;
}

inline std::vector<int> random_labels(int b, int classes, Rng& rng) {
    std::vector<int> labels(b);
    for (auto& l : labels) l = int(rng.uniform_int(uint64_t(classes)));
    return labels;
}

}  // namespace disent::testsupport
