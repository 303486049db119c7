// Timing comparison of the serial reference kernels against the OpenMP
// variants at the matrix shapes the training loop actually hits.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "disent/kernels.hpp"
#include "disent/rng.hpp"

using disent::Matrix;
namespace kernels = disent::kernels;

namespace {

Matrix random_matrix(int rows, int cols, disent::Rng& rng) {
    Matrix m(rows, cols);
    for (size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

double time_best_of(const std::function<void()>& fn, int reps) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const std::string& name, double flops, double serial_s, double parallel_s) {
    std::printf("%-28s serial %8.1f ms (%6.2f GF/s)   omp %8.1f ms (%6.2f GF/s)   speedup %.2fx\n",
                name.c_str(), serial_s * 1e3, flops / serial_s * 1e-9, parallel_s * 1e3,
                flops / parallel_s * 1e-9, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const int reps = quick ? 1 : 3;
    disent::Rng rng(42);

    std::printf("threads: %d\n\n", omp_get_max_threads());

    struct Shape {
        const char* name;
        int n, m, p;
    };
    // batch x layer shapes from the d-500-500-2000-c-2000-500-500-d network
    const std::vector<Shape> shapes = {
        {"matmul 256x784x500", 256, 784, 500},
        {"matmul 256x500x2000", 256, 500, 2000},
        {"matmul 256x2000x70", 256, 2000, 70},
        {"matmul 2000x256x500 (tn)", 2000, 256, 500},
    };

    for (size_t s = 0; s < shapes.size(); ++s) {
        const auto& shape = shapes[s];
        const bool tn = std::string(shape.name).find("(tn)") != std::string::npos;
        Matrix out;
        if (tn) {
            // weight-gradient shape: dW = dz^T x with dz (m x n), x (m x p)
            Matrix dz = random_matrix(shape.m, shape.n, rng);
            Matrix x = random_matrix(shape.m, shape.p, rng);
            const double flops = 2.0 * shape.n * shape.m * shape.p;
            const double t_serial =
                time_best_of([&] { kernels::serial::matmul_tn(dz, x, out); }, reps);
            const double t_omp = time_best_of([&] { kernels::omp::matmul_tn(dz, x, out); }, reps);
            report(shape.name, flops, t_serial, t_omp);
        } else {
            Matrix a = random_matrix(shape.n, shape.m, rng);
            Matrix b = random_matrix(shape.m, shape.p, rng);
            const double flops = 2.0 * shape.n * shape.m * shape.p;
            const double t_serial = time_best_of([&] { kernels::serial::matmul(a, b, out); }, reps);
            const double t_omp = time_best_of([&] { kernels::omp::matmul(a, b, out); }, reps);
            report(shape.name, flops, t_serial, t_omp);
        }
    }

    {
        Matrix x = random_matrix(256, 2000, rng);
        Matrix dist;
        std::vector<double> inv;
        const double flops = 2.0 * 256 * 256 * 2000;
        const double t_serial =
            time_best_of([&] { kernels::serial::pairwise_cosine_distance(x, dist, inv); }, reps);
        const double t_omp =
            time_best_of([&] { kernels::omp::pairwise_cosine_distance(x, dist, inv); }, reps);
        report("pairwise cosine 256x2000", flops, t_serial, t_omp);
    }
    {
        Matrix x = random_matrix(10000, 70, rng);
        Matrix c = random_matrix(10, 70, rng);
        Matrix dist;
        const double flops = 3.0 * 10000 * 10 * 70;
        const double t_serial =
            time_best_of([&] { kernels::serial::sq_distance_to_centroids(x, c, dist); }, reps);
        const double t_omp =
            time_best_of([&] { kernels::omp::sq_distance_to_centroids(x, c, dist); }, reps);
        report("assign 10000x10x70", flops, t_serial, t_omp);
    }
    return 0;
}
