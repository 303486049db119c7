#pragma once

#include <vector>

#include "disent/matrix.hpp"

// Data-parallel numeric kernels. Every kernel comes in two variants:
//
//   kernels::serial::* - naive reference loops, kept for tests and the
//                        bench target
//   kernels::omp::*    - tiled, vectorizable loops parallelized with OpenMP
//
// The omp variants are written so that each output element is produced by
// exactly one thread with a fixed accumulation order: results are
// bit-identical across runs, thread counts and schedules. Against the serial
// reference they agree to within FMA-contraction rounding (the compiler is
// free to fuse multiply-adds differently in the two loop forms).
//
// The unqualified entry points dispatch on the process-wide backend
// (parallel by default). Inputs are assumed finite.

namespace disent::kernels {

enum class Backend { Serial, Parallel };

Backend backend();
void set_backend(Backend b);

namespace serial {
// out = a * b                 (n x m) * (m x p)
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b^T               (n x m) * (p x m)^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
// out = a^T * b               (r x n)^T * (r x p)
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void transpose(const Matrix& a, Matrix& out);
// out[j] = sum_i a(i, j)
void colsum(const Matrix& a, std::vector<double>& out);
// dist(i, j) = 1 - cos(x_i, x_j); dist(i, i) = 0. inv_norms[i] = 1/||x_i||
// (0 for an exactly-zero row, which is treated as orthogonal to everything).
void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms);
// dist(i, j) = ||x_i - c_j||^2 for each point row i and centroid row j.
void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist);
}  // namespace serial

namespace omp {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void transpose(const Matrix& a, Matrix& out);
void colsum(const Matrix& a, std::vector<double>& out);
void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms);
void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist);
}  // namespace omp

void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void transpose(const Matrix& a, Matrix& out);
void colsum(const Matrix& a, std::vector<double>& out);
void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms);
void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist);

}  // namespace disent::kernels
