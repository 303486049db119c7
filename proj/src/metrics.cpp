#include "disent/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "disent/errors.hpp"
#include "disent/rng.hpp"

namespace disent::metrics {

namespace {

std::vector<int> densify(const std::vector<int>& labels, int& k_out) {
    std::map<int, int> remap;
    for (int l : labels) remap.emplace(l, 0);
    int next = 0;
    for (auto& [key, value] : remap) value = next++;
    k_out = next;
    std::vector<int> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
    return out;
}

int64_t choose2(int64_t n) { return n * (n - 1) / 2; }

}  // namespace

ContingencyTable ContingencyTable::build(const std::vector<int>& truth,
                                         const std::vector<int>& pred) {
    if (truth.size() != pred.size()) throw ArgumentError("contingency: length mismatch");
    if (truth.empty()) throw ArgumentError("contingency: empty partitions");
    ContingencyTable table;
    const auto t = densify(truth, table.k_true);
    const auto p = densify(pred, table.k_pred);
    table.n = int64_t(truth.size());
    table.counts.assign(size_t(table.k_true) * table.k_pred, 0);
    table.row_marginals.assign(table.k_true, 0);
    table.col_marginals.assign(table.k_pred, 0);
    for (size_t i = 0; i < t.size(); ++i) {
        table.counts[size_t(t[i]) * table.k_pred + p[i]] += 1;
        table.row_marginals[t[i]] += 1;
        table.col_marginals[p[i]] += 1;
    }
    return table;
}

// Hungarian method with potentials on the equivalent min-cost problem.
int64_t max_assignment(const std::vector<std::vector<int64_t>>& weight) {
    const int n = int(weight.size());
    if (n == 0) return 0;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // cost = max_weight - weight, so minimizing cost maximizes weight.
    int64_t max_w = 0;
    for (const auto& row : weight)
        for (int64_t w : row) max_w = std::max(max_w, w);

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = double(max_w - weight[i0 - 1][j - 1]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    int64_t total = 0;
    for (int j = 1; j <= n; ++j)
        if (match[j] != 0) total += weight[match[j] - 1][j - 1];
    return total;
}

double clustering_accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
    const auto table = ContingencyTable::build(truth, pred);
    const int k = std::max(table.k_true, table.k_pred);
    std::vector<std::vector<int64_t>> weight(k, std::vector<int64_t>(k, 0));
    for (int t = 0; t < table.k_true; ++t)
        for (int p = 0; p < table.k_pred; ++p) weight[t][p] = table.at(t, p);
    return double(max_assignment(weight)) / double(table.n);
}

double nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
    const auto table = ContingencyTable::build(truth, pred);
    const double n = double(table.n);
    double h_true = 0.0, h_pred = 0.0, mutual = 0.0;
    for (int64_t a : table.row_marginals)
        if (a > 0) h_true -= (a / n) * std::log(a / n);
    for (int64_t b : table.col_marginals)
        if (b > 0) h_pred -= (b / n) * std::log(b / n);
    for (int t = 0; t < table.k_true; ++t) {
        for (int p = 0; p < table.k_pred; ++p) {
            const int64_t c = table.at(t, p);
            if (c == 0) continue;
            mutual += (c / n) * std::log(double(c) * n /
                                         (double(table.row_marginals[t]) *
                                          double(table.col_marginals[p])));
        }
    }
    const double denom = h_true + h_pred;
    if (denom == 0.0) return 0.0;  // both partitions trivial
    return 2.0 * mutual / denom;
}

double ari(const std::vector<int>& truth, const std::vector<int>& pred) {
    const auto table = ContingencyTable::build(truth, pred);
    int64_t sum_cells = 0, sum_rows = 0, sum_cols = 0;
    for (int64_t c : table.counts) sum_cells += choose2(c);
    for (int64_t a : table.row_marginals) sum_rows += choose2(a);
    for (int64_t b : table.col_marginals) sum_cols += choose2(b);
    const int64_t pairs = choose2(table.n);

    // ARI = (sum_cells - E) / (max - E) with E = sum_rows*sum_cols/pairs;
    // multiplied through by 2*pairs to stay in exact integers.
    const __int128 num = __int128(2) * (__int128(pairs) * sum_cells - __int128(sum_rows) * sum_cols);
    const __int128 den =
        __int128(pairs) * (sum_rows + sum_cols) - __int128(2) * sum_rows * sum_cols;
    if (den == 0) return 1.0;  // both partitions trivial and identical in pair structure
    return double(num) / double(den);
}

namespace {

double euclid(const double* a, const double* b, int m) {
    double sum = 0.0;
    for (int t = 0; t < m; ++t) {
        const double d = a[t] - b[t];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

double silhouette(const Matrix& points, const std::vector<int>& pred) {
    const int n = points.rows();
    const int m = points.cols();
    if (int(pred.size()) != n) throw ArgumentError("silhouette: length mismatch");
    int k = 0;
    const auto labels = densify(pred, k);
    if (k < 2) throw UndefinedValueError("silhouette: needs at least 2 clusters");

    std::vector<int64_t> sizes(k, 0);
    for (int l : labels) sizes[l] += 1;

    std::vector<double> scores(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) {
            scores[i] = 0.0;  // singleton convention
            continue;
        }
        std::vector<double> cluster_sum(k, 0.0);
        const double* xi = points.row(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            cluster_sum[labels[j]] += euclid(xi, points.row(j), m);
        }
        const int own = labels[i];
        const double a = cluster_sum[own] / double(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, cluster_sum[c] / double(sizes[c]));
        }
        const double denom = std::max(a, b);
        scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }

    double total = 0.0;
    for (double s : scores) total += s;
    return total / double(n);
}

SilhouetteResult silhouette_scored(const Matrix& points, const std::vector<int>& pred,
                                   const SilhouetteOptions& options) {
    SilhouetteResult result;
    const int n = points.rows();
    if (n <= options.full_limit) {
        result.value = silhouette(points, pred);
        result.sample_size = n;
        return result;
    }
    Rng rng(options.seed);
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < options.sample_size; ++i) {
        const int j = i + int(rng.uniform_int(uint64_t(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(options.sample_size);
    std::sort(pool.begin(), pool.end());

    Matrix sub(options.sample_size, points.cols());
    std::vector<int> sub_pred(options.sample_size);
    for (int i = 0; i < options.sample_size; ++i) {
        std::copy_n(points.row(pool[i]), points.cols(), sub.row(i));
        sub_pred[i] = pred[pool[i]];
    }
    result.value = silhouette(sub, sub_pred);
    result.sampled = true;
    result.seed = options.seed;
    result.sample_size = options.sample_size;
    return result;
}

namespace {

struct ClusterGeometry {
    int k = 0;
    std::vector<int> labels;      // densified
    std::vector<int64_t> sizes;
    Matrix centroids;             // k x m, cluster means
    std::vector<double> overall;  // m, grand mean
};

ClusterGeometry cluster_geometry(const Matrix& points, const std::vector<int>& pred) {
    const int n = points.rows();
    const int m = points.cols();
    if (int(pred.size()) != n) throw ArgumentError("metrics: length mismatch");
    ClusterGeometry geo;
    geo.labels = densify(pred, geo.k);
    geo.sizes.assign(geo.k, 0);
    geo.centroids.resize(geo.k, m);
    geo.overall.assign(m, 0.0);
    for (int i = 0; i < n; ++i) {
        const int c = geo.labels[i];
        geo.sizes[c] += 1;
        const double* row = points.row(i);
        double* crow = geo.centroids.row(c);
        for (int t = 0; t < m; ++t) {
            crow[t] += row[t];
            geo.overall[t] += row[t];
        }
    }
    for (int c = 0; c < geo.k; ++c) {
        double* crow = geo.centroids.row(c);
        for (int t = 0; t < m; ++t) crow[t] /= double(geo.sizes[c]);
    }
    for (double& v : geo.overall) v /= double(n);
    return geo;
}

}  // namespace

double calinski_harabasz(const Matrix& points, const std::vector<int>& pred) {
    const int n = points.rows();
    const int m = points.cols();
    const auto geo = cluster_geometry(points, pred);
    if (geo.k < 2) throw UndefinedValueError("calinski_harabasz: needs at least 2 clusters");

    double within = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = points.row(i);
        const double* crow = geo.centroids.row(geo.labels[i]);
        for (int t = 0; t < m; ++t) {
            const double d = row[t] - crow[t];
            within += d * d;
        }
    }
    double between = 0.0;
    for (int c = 0; c < geo.k; ++c) {
        const double* crow = geo.centroids.row(c);
        double sq = 0.0;
        for (int t = 0; t < m; ++t) {
            const double d = crow[t] - geo.overall[t];
            sq += d * d;
        }
        between += double(geo.sizes[c]) * sq;
    }
    if (within == 0.0) return std::numeric_limits<double>::infinity();
    return (between / within) * (double(n - geo.k) / double(geo.k - 1));
}

double davies_bouldin(const Matrix& points, const std::vector<int>& pred) {
    const int n = points.rows();
    const int m = points.cols();
    const auto geo = cluster_geometry(points, pred);
    if (geo.k < 2) throw UndefinedValueError("davies_bouldin: needs at least 2 clusters");

    std::vector<double> spread(geo.k, 0.0);  // mean distance to centroid
    for (int i = 0; i < n; ++i)
        spread[geo.labels[i]] += euclid(points.row(i), geo.centroids.row(geo.labels[i]), m);
    for (int c = 0; c < geo.k; ++c) spread[c] /= double(geo.sizes[c]);

    double total = 0.0;
    for (int i = 0; i < geo.k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < geo.k; ++j) {
            if (j == i) continue;
            const double dist = euclid(geo.centroids.row(i), geo.centroids.row(j), m);
            double ratio;
            if (dist == 0.0)
                ratio = std::numeric_limits<double>::infinity();  // coincident centroids
            else
                ratio = (spread[i] + spread[j]) / dist;
            worst = std::max(worst, ratio);
        }
        total += worst;
    }
    return total / double(geo.k);
}

MetricsReport evaluate_all(const Matrix& points, const std::vector<int>& truth,
                           const std::vector<int>& pred, const SilhouetteOptions& sil_options) {
    MetricsReport report;
    report.acc = clustering_accuracy(truth, pred);
    report.nmi = nmi(truth, pred);
    report.ari = ari(truth, pred);
    const auto sil = silhouette_scored(points, pred, sil_options);
    report.sil = sil.value;
    report.sil_sampled = sil.sampled;
    report.sil_sample_seed = sil.seed;
    report.sil_sample_size = sil.sample_size;
    report.chs = calinski_harabasz(points, pred);
    report.dbi = davies_bouldin(points, pred);
    return report;
}

}  // namespace disent::metrics
