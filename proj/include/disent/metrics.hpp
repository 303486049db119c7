#pragma once

#include <cstdint>
#include <vector>

#include "disent/matrix.hpp"

namespace disent::metrics {

// Co-occurrence counts between truth classes and predicted clusters. Input
// label alphabets are remapped to dense indices in sorted value order.
struct ContingencyTable {
    int k_true = 0;
    int k_pred = 0;
    int64_t n = 0;
    std::vector<int64_t> counts;  // k_true x k_pred, row-major
    std::vector<int64_t> row_marginals;
    std::vector<int64_t> col_marginals;

    int64_t at(int t, int p) const { return counts[size_t(t) * k_pred + p]; }

    static ContingencyTable build(const std::vector<int>& truth, const std::vector<int>& pred);
};

// Maximum-total-weight one-to-one assignment (Hungarian method) on a square
// weight matrix; exposed for the accuracy metric and its tests.
int64_t max_assignment(const std::vector<std::vector<int64_t>>& weight);

// Best-match accuracy: max over one-to-one cluster-to-label mappings of the
// fraction of agreeing points.
double clustering_accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

// 2 I(y,c) / (H(y) + H(c)) with natural logs; 0 when both entropies vanish.
double nmi(const std::vector<int>& truth, const std::vector<int>& pred);

// Adjusted Rand index via exact pair-counting sums (128-bit intermediates).
double ari(const std::vector<int>& truth, const std::vector<int>& pred);

// Mean silhouette coefficient with Euclidean distance; singleton clusters
// contribute 0. Throws UndefinedValueError for a single cluster.
double silhouette(const Matrix& points, const std::vector<int>& pred);

struct SilhouetteOptions {
    int full_limit = 20000;   // compute exactly up to this many points
    int sample_size = 10000;  // uniform subsample size above the limit
    uint64_t seed = 0;
};

struct SilhouetteResult {
    double value = 0.0;
    bool sampled = false;
    uint64_t seed = 0;
    int sample_size = 0;
};

// Silhouette with the O(N^2) cost capped by uniform subsampling; the sample
// seed is recorded so reports can flag sampled values.
SilhouetteResult silhouette_scored(const Matrix& points, const std::vector<int>& pred,
                                   const SilhouetteOptions& options = {});

// Calinski-Harabasz score; +infinity when the within-cluster dispersion is 0.
double calinski_harabasz(const Matrix& points, const std::vector<int>& pred);

// Davies-Bouldin index; +infinity when two cluster centroids coincide.
double davies_bouldin(const Matrix& points, const std::vector<int>& pred);

// All six scores for one clustering of one embedding.
struct MetricsReport {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double sil = 0.0;
    double chs = 0.0;
    double dbi = 0.0;
    bool sil_sampled = false;
    uint64_t sil_sample_seed = 0;
    int sil_sample_size = 0;
};

MetricsReport evaluate_all(const Matrix& points, const std::vector<int>& truth,
                           const std::vector<int>& pred, const SilhouetteOptions& sil_options = {});

}  // namespace disent::metrics
