#include "disent/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disent::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::Parallel};

// Per-element accumulation order in every kernel below is the plain loop
// order of the serial reference, so serial and omp variants agree bitwise
// on finite inputs.
constexpr int kRowTile = 16;
}  // namespace

Backend backend() { return g_backend.load(std::memory_order_relaxed); }
void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

// ---------------------------------------------------------------------------
// serial reference
// ---------------------------------------------------------------------------

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    const int n = a.rows(), m = a.cols(), p = b.cols();
    out.resize(n, p);
    for (int i = 0; i < n; ++i) {
        double* c = out.row(i);
        for (int j = 0; j < p; ++j) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) sum += a(i, k) * b(k, j);
            c[j] = sum;
        }
    }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    const int n = a.rows(), m = a.cols(), p = b.rows();
    out.resize(n, p);
    for (int i = 0; i < n; ++i) {
        const double* arow = a.row(i);
        double* c = out.row(i);
        for (int j = 0; j < p; ++j) {
            const double* brow = b.row(j);
            double sum = 0.0;
            for (int k = 0; k < m; ++k) sum += arow[k] * brow[k];
            c[j] = sum;
        }
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    const int r = a.rows(), n = a.cols(), p = b.cols();
    out.resize(n, p);
    for (int i = 0; i < n; ++i) {
        double* c = out.row(i);
        for (int j = 0; j < p; ++j) {
            double sum = 0.0;
            for (int t = 0; t < r; ++t) sum += a(t, i) * b(t, j);
            c[j] = sum;
        }
    }
}

void transpose(const Matrix& a, Matrix& out) {
    const int n = a.rows(), m = a.cols();
    out.resize(m, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out(j, i) = a(i, j);
}

void colsum(const Matrix& a, std::vector<double>& out) {
    const int n = a.rows(), m = a.cols();
    out.assign(m, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* arow = a.row(i);
        for (int j = 0; j < m; ++j) out[j] += arow[j];
    }
}

void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms) {
    const int b = x.rows();
    Matrix gram;
    matmul_nt(x, x, gram);
    inv_norms.assign(b, 0.0);
    for (int i = 0; i < b; ++i) {
        const double sq = gram(i, i);
        inv_norms[i] = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
    }
    dist.resize(b, b);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j)
            dist(i, j) = 1.0 - gram(i, j) * inv_norms[i] * inv_norms[j];
        dist(i, i) = 0.0;
    }
}

void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist) {
    const int n = x.rows(), m = x.cols(), k = centroids.rows();
    dist.resize(n, k);
    for (int i = 0; i < n; ++i) {
        const double* xrow = x.row(i);
        double* drow = dist.row(i);
        for (int j = 0; j < k; ++j) {
            const double* crow = centroids.row(j);
            double sum = 0.0;
            for (int t = 0; t < m; ++t) {
                const double d = xrow[t] - crow[t];
                sum += d * d;
            }
            drow[j] = sum;
        }
    }
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP variants
// ---------------------------------------------------------------------------

namespace omp {

namespace {

// Row-tiled axpy core for out = a * b; k accumulation order equals the
// serial dot order. Skipping a == 0 multiplicands is exact on finite input
// and pays off on ReLU activations.
void matmul_core(const Matrix& a, const Matrix& b, Matrix& out) {
    const int n = a.rows(), m = a.cols(), p = b.cols();
    out.resize(n, p);
    const int tiles = (n + kRowTile - 1) / kRowTile;
#pragma omp parallel for schedule(static)
    for (int tile = 0; tile < tiles; ++tile) {
        const int i0 = tile * kRowTile;
        const int i1 = std::min(i0 + kRowTile, n);
        int k = 0;
        for (; k + 4 <= m; k += 4) {
            const double* b0 = b.row(k);
            const double* b1 = b.row(k + 1);
            const double* b2 = b.row(k + 2);
            const double* b3 = b.row(k + 3);
            for (int i = i0; i < i1; ++i) {
                const double a0 = a(i, k), a1 = a(i, k + 1), a2 = a(i, k + 2), a3 = a(i, k + 3);
                double* c = out.row(i);
                if (a0 == 0.0 && a1 == 0.0 && a2 == 0.0 && a3 == 0.0) continue;
                for (int j = 0; j < p; ++j)
                    c[j] = ((((c[j] + a0 * b0[j]) + a1 * b1[j]) + a2 * b2[j]) + a3 * b3[j]);
            }
        }
        for (; k < m; ++k) {
            const double* brow = b.row(k);
            for (int i = i0; i < i1; ++i) {
                const double av = a(i, k);
                if (av == 0.0) continue;
                double* c = out.row(i);
                for (int j = 0; j < p; ++j) c[j] += av * brow[j];
            }
        }
    }
}

}  // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& out) { matmul_core(a, b, out); }

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    Matrix bt;
    transpose(b, bt);
    matmul_core(a, bt, out);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    const int r = a.rows(), n = a.cols(), p = b.cols();
    out.resize(n, p);
    const int tiles = (n + kRowTile - 1) / kRowTile;
#pragma omp parallel for schedule(static)
    for (int tile = 0; tile < tiles; ++tile) {
        const int i0 = tile * kRowTile;
        const int i1 = std::min(i0 + kRowTile, n);
        for (int t = 0; t < r; ++t) {
            const double* arow = a.row(t);
            const double* brow = b.row(t);
            for (int i = i0; i < i1; ++i) {
                const double av = arow[i];
                if (av == 0.0) continue;
                double* c = out.row(i);
                for (int j = 0; j < p; ++j) c[j] += av * brow[j];
            }
        }
    }
}

void transpose(const Matrix& a, Matrix& out) {
    const int n = a.rows(), m = a.cols();
    out.resize(m, n);
    constexpr int kBlock = 32;
#pragma omp parallel for schedule(static)
    for (int jb = 0; jb < m; jb += kBlock) {
        const int jmax = std::min(jb + kBlock, m);
        for (int ib = 0; ib < n; ib += kBlock) {
            const int imax = std::min(ib + kBlock, n);
            for (int j = jb; j < jmax; ++j)
                for (int i = ib; i < imax; ++i) out(j, i) = a(i, j);
        }
    }
}

void colsum(const Matrix& a, std::vector<double>& out) {
    const int n = a.rows(), m = a.cols();
    out.assign(m, 0.0);
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (int jb = 0; jb < m; jb += 256) {
        const int jmax = std::min(jb + 256, m);
        for (int i = 0; i < n; ++i) {
            const double* arow = a.row(i);
            for (int j = jb; j < jmax; ++j) o[j] += arow[j];
        }
    }
}

void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms) {
    const int b = x.rows();
    Matrix gram;
    matmul_nt(x, x, gram);
    inv_norms.assign(b, 0.0);
    for (int i = 0; i < b; ++i) {
        const double sq = gram(i, i);
        inv_norms[i] = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
    }
    dist.resize(b, b);
    const double* inv = inv_norms.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < b; ++i) {
        double* drow = dist.row(i);
        const double* grow = gram.row(i);
        for (int j = 0; j < b; ++j) drow[j] = 1.0 - grow[j] * inv[i] * inv[j];
        drow[i] = 0.0;
    }
}

void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist) {
    const int n = x.rows(), m = x.cols(), k = centroids.rows();
    dist.resize(n, k);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* xrow = x.row(i);
        double* drow = dist.row(i);
        for (int j = 0; j < k; ++j) {
            const double* crow = centroids.row(j);
            double sum = 0.0;
            for (int t = 0; t < m; ++t) {
                const double d = xrow[t] - crow[t];
                sum += d * d;
            }
            drow[j] = sum;
        }
    }
}

}  // namespace omp

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

#define DISENT_DISPATCH(fn, ...)                 \
    do {                                         \
        if (backend() == Backend::Serial)        \
            serial::fn(__VA_ARGS__);             \
        else                                     \
            omp::fn(__VA_ARGS__);                \
    } while (0)

void matmul(const Matrix& a, const Matrix& b, Matrix& out) { DISENT_DISPATCH(matmul, a, b, out); }
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) { DISENT_DISPATCH(matmul_nt, a, b, out); }
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) { DISENT_DISPATCH(matmul_tn, a, b, out); }
void transpose(const Matrix& a, Matrix& out) { DISENT_DISPATCH(transpose, a, out); }
void colsum(const Matrix& a, std::vector<double>& out) { DISENT_DISPATCH(colsum, a, out); }
void pairwise_cosine_distance(const Matrix& x, Matrix& dist, std::vector<double>& inv_norms) {
    DISENT_DISPATCH(pairwise_cosine_distance, x, dist, inv_norms);
}
void sq_distance_to_centroids(const Matrix& x, const Matrix& centroids, Matrix& dist) {
    DISENT_DISPATCH(sq_distance_to_centroids, x, centroids, dist);
}

#undef DISENT_DISPATCH

}  // namespace disent::kernels
