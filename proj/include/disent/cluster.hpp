#pragma once

#include <cstdint>
#include <vector>

#include "disent/matrix.hpp"

namespace disent::cluster {

struct ClusterResult {
    Matrix centroids;              // k x m
    std::vector<int> assignments;  // length N, values in [0, k)
    double inertia = 0.0;          // sum of squared distances to assigned centroids
    int iterations_run = 0;
    uint64_t seed = 0;
    std::vector<double> inertia_trace;  // inertia after each assignment step (non-increasing)
};

// k-means++ seeding: first centroid uniform, each next drawn with probability
// proportional to the squared distance to the nearest chosen centroid.
Matrix kmeans_pp_seed(const Matrix& points, int k, uint64_t seed);

// Lloyd's algorithm from k-means++ seeds. Stops when every centroid moves
// less than 1e-6 (relative to the data's RMS scale) or after max_iters.
// Empty clusters are re-seeded to the point farthest from its centroid.
ClusterResult kmeans(const Matrix& points, int k, int max_iters, uint64_t seed);

// Lloyd's algorithm from caller-provided centroids.
ClusterResult kmeans_with_init(const Matrix& points, Matrix centroids, int max_iters,
                               uint64_t seed = 0);

// Nine independently seeded runs; run r uses 10*r iterations. The ninth run
// (back()) is the reporting result.
std::vector<ClusterResult> nine_run_protocol(const Matrix& points, int k, uint64_t base_seed);

struct PcaProjector {
    std::vector<double> mean;                // d
    Matrix components;                       // c x d, orthonormal rows
    std::vector<double> explained_variance;  // c, non-increasing
};

// Top-c principal components via cyclic Jacobi eigendecomposition of the
// sample covariance.
PcaProjector pca_fit(const Matrix& points, int c);

Matrix pca_transform(const PcaProjector& projector, const Matrix& points);

}  // namespace disent::cluster
