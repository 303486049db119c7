#include "disent/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "disent/errors.hpp"
#include "disent/kernels.hpp"
#include "disent/rng.hpp"

namespace disent::cluster {

namespace {

double sq_dist(const double* a, const double* b, int m) {
    double sum = 0.0;
    for (int t = 0; t < m; ++t) {
        const double d = a[t] - b[t];
        sum += d * d;
    }
    return sum;
}

// Nearest-centroid assignment; returns per-point squared distance to the
// chosen centroid. Ties break to the lowest centroid index.
void assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignments,
                   std::vector<double>& min_dists) {
    const int n = points.rows();
    const int k = centroids.rows();
    Matrix dists;
    kernels::sq_distance_to_centroids(points, centroids, dists);
    assignments.resize(n);
    min_dists.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* drow = dists.row(i);
        int best = 0;
        double best_d = drow[0];
        for (int j = 1; j < k; ++j) {
            if (drow[j] < best_d) {
                best_d = drow[j];
                best = j;
            }
        }
        assignments[i] = best;
        min_dists[i] = best_d;
    }
}

double data_rms(const Matrix& points) {
    double total = 0.0;
    for (size_t i = 0; i < points.size(); ++i) total += points.data()[i] * points.data()[i];
    return std::sqrt(total / std::max<size_t>(1, points.rows()));
}

}  // namespace

Matrix kmeans_pp_seed(const Matrix& points, int k, uint64_t seed) {
    const int n = points.rows();
    const int m = points.cols();
    if (k < 1) throw ArgumentError("kmeans_pp_seed: k must be >= 1");
    if (k > n) throw ArgumentError("kmeans_pp_seed: k exceeds point count");

    Rng rng(seed);
    Matrix centroids(k, m);
    const int first = int(rng.uniform_int(uint64_t(n)));
    std::copy_n(points.row(first), m, centroids.row(0));

    std::vector<double> d2(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), centroids.row(0), m);

    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (double v : d2) total += v;
        int pick;
        if (total > 0.0) {
            pick = int(rng.weighted_pick(d2, total));
        } else {
            // Fewer distinct points than centroids chosen; fall back to uniform.
            pick = int(rng.uniform_int(uint64_t(n)));
        }
        std::copy_n(points.row(pick), m, centroids.row(j));
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], sq_dist(points.row(i), centroids.row(j), m));
    }
    return centroids;
}

ClusterResult kmeans_with_init(const Matrix& points, Matrix centroids, int max_iters,
                               uint64_t seed) {
    const int n = points.rows();
    const int m = points.cols();
    const int k = centroids.rows();
    if (k < 1 || k > n) throw ArgumentError("kmeans: need 1 <= k <= N");

    ClusterResult result;
    result.seed = seed;
    const double tol = 1e-6 * std::max(1.0, data_rms(points));

    std::vector<int> assignments;
    std::vector<double> min_dists;
    Matrix sums(k, m);
    std::vector<int> counts(k);

    for (int iter = 1; iter <= max_iters; ++iter) {
        assign_points(points, centroids, assignments, min_dists);
        double inertia = 0.0;
        for (double d : min_dists) inertia += d;
        result.inertia_trace.push_back(inertia);
        result.iterations_run = iter;

        sums.fill(0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            const int c = assignments[i];
            counts[c] += 1;
            const double* xrow = points.row(i);
            double* srow = sums.row(c);
            for (int t = 0; t < m; ++t) srow[t] += xrow[t];
        }

        // Empty clusters grab the points currently farthest from their centroid.
        std::vector<int> empties;
        for (int c = 0; c < k; ++c)
            if (counts[c] == 0) empties.push_back(c);
        std::vector<char> taken(n, 0);
        for (int c : empties) {
            int far_idx = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (!taken[i] && min_dists[i] > far_d) {
                    far_d = min_dists[i];
                    far_idx = i;
                }
            }
            taken[far_idx] = 1;
            counts[c] = -1;  // mark: centroid set directly
            std::copy_n(points.row(far_idx), m, sums.row(c));
        }

        double max_move_sq = 0.0;
        for (int c = 0; c < k; ++c) {
            double* srow = sums.row(c);
            if (counts[c] > 0) {
                const double inv = 1.0 / counts[c];
                for (int t = 0; t < m; ++t) srow[t] *= inv;
            }
            max_move_sq = std::max(max_move_sq, sq_dist(srow, centroids.row(c), m));
            std::copy_n(srow, m, centroids.row(c));
        }
        if (std::sqrt(max_move_sq) < tol) break;
    }

    // Sync assignments and inertia with the final centroids.
    assign_points(points, centroids, assignments, min_dists);
    double inertia = 0.0;
    for (double d : min_dists) inertia += d;
    result.inertia_trace.push_back(inertia);
    result.inertia = inertia;
    result.assignments = std::move(assignments);
    result.centroids = std::move(centroids);
    return result;
}

ClusterResult kmeans(const Matrix& points, int k, int max_iters, uint64_t seed) {
    ClusterResult result = kmeans_with_init(points, kmeans_pp_seed(points, k, seed), max_iters, seed);
    return result;
}

std::vector<ClusterResult> nine_run_protocol(const Matrix& points, int k, uint64_t base_seed) {
    std::vector<ClusterResult> runs;
    runs.reserve(9);
    for (int r = 1; r <= 9; ++r)
        runs.push_back(kmeans(points, k, 10 * r, Rng::mix_seed(base_seed, uint64_t(r))));
    return runs;
}

// ---------------------------------------------------------------------------
// PCA via cyclic Jacobi
// ---------------------------------------------------------------------------

namespace {

// Jacobi eigendecomposition of a symmetric matrix: a is destroyed, its
// diagonal becomes the eigenvalues; v's columns are the eigenvectors.
void jacobi_eigensymm(Matrix& a, Matrix& v, int max_sweeps = 64) {
    const int d = a.rows();
    v.resize(d, d);
    for (int i = 0; i < d; ++i) v(i, i) = 1.0;
    if (d == 1) return;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0) return;
        double diag = 0.0;
        for (int p = 0; p < d; ++p) diag += a(p, p) * a(p, p);
        if (off <= 1e-30 * std::max(1.0, diag)) return;

        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int i = 0; i < d; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < d; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < d; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

}  // namespace

PcaProjector pca_fit(const Matrix& points, int c) {
    const int n = points.rows();
    const int d = points.cols();
    if (c < 1 || c > std::min(n, d)) throw ArgumentError("pca_fit: need 1 <= c <= min(N, d)");
    if (n < 2) throw ArgumentError("pca_fit: need at least 2 points");

    PcaProjector proj;
    proj.mean.assign(d, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = points.row(i);
        for (int j = 0; j < d; ++j) proj.mean[j] += row[j];
    }
    for (double& v : proj.mean) v /= n;

    Matrix centered(n, d);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* src = points.row(i);
        double* dst = centered.row(i);
        for (int j = 0; j < d; ++j) dst[j] = src[j] - proj.mean[j];
    }

    Matrix cov;
    kernels::matmul_tn(centered, centered, cov);
    const double inv = 1.0 / (n - 1);
    for (size_t i = 0; i < cov.size(); ++i) cov.data()[i] *= inv;

    Matrix eigvecs;
    jacobi_eigensymm(cov, eigvecs);

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&cov](int a, int b) { return cov(a, a) > cov(b, b); });

    proj.components.resize(c, d);
    proj.explained_variance.resize(c);
    for (int r = 0; r < c; ++r) {
        const int col = order[r];
        proj.explained_variance[r] = std::max(0.0, cov(col, col));
        for (int j = 0; j < d; ++j) proj.components(r, j) = eigvecs(j, col);
    }
    return proj;
}

Matrix pca_transform(const PcaProjector& projector, const Matrix& points) {
    const int n = points.rows();
    const int d = points.cols();
    if (d != int(projector.mean.size())) throw ArgumentError("pca_transform: dimension mismatch");
    Matrix centered(n, d);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* src = points.row(i);
        double* dst = centered.row(i);
        for (int j = 0; j < d; ++j) dst[j] = src[j] - projector.mean[j];
    }
    Matrix out;
    kernels::matmul_nt(centered, projector.components, out);
    return out;
}

}  // namespace disent::cluster
