#include "disent/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "disent/rng.hpp"
#include "doctest.h"

using disent::Matrix;
using disent::Rng;
namespace kernels = disent::kernels;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double zero_fraction = 0.0) {
    Matrix m(rows, cols);
    for (size_t i = 0; i < m.size(); ++i)
        m.data()[i] = rng.uniform() < zero_fraction ? 0.0 : rng.normal();
    return m;
}

// serial and omp variants agree up to FMA-contraction rounding
void check_equal(const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    for (size_t i = 0; i < a.size(); ++i) {
        const double x = a.data()[i], y = b.data()[i];
        REQUIRE(std::abs(x - y) <= 1e-13 * std::max({1.0, std::abs(x), std::abs(y)}));
    }
}

}  // namespace

TEST_CASE("omp matmul variants match the serial reference bitwise") {
    Rng rng(7);
    // odd sizes on purpose: exercise the unroll remainders and row tiles
    const std::vector<std::array<int, 3>> shapes = {
        {1, 1, 1}, {3, 5, 2}, {17, 33, 9}, {64, 31, 127}, {130, 70, 65}};
    for (const auto& [n, m, p] : shapes) {
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(p);
        // include exact zeros: the omp kernels skip zero multiplicands
        Matrix a = random_matrix(n, m, rng, 0.4);
        Matrix b = random_matrix(m, p, rng);
        Matrix serial_out, omp_out;

        kernels::serial::matmul(a, b, serial_out);
        kernels::omp::matmul(a, b, omp_out);
        check_equal(serial_out, omp_out);

        Matrix bt = random_matrix(p, m, rng);
        kernels::serial::matmul_nt(a, bt, serial_out);
        kernels::omp::matmul_nt(a, bt, omp_out);
        check_equal(serial_out, omp_out);

        Matrix at = random_matrix(m, n, rng, 0.4);
        Matrix bb = random_matrix(m, p, rng);
        kernels::serial::matmul_tn(at, bb, serial_out);
        kernels::omp::matmul_tn(at, bb, omp_out);
        check_equal(serial_out, omp_out);
    }
}

TEST_CASE("matmul against a hand-computed product") {
    Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    Matrix b(3, 2, {7, 8, 9, 10, 11, 12});
    Matrix out;
    kernels::matmul(a, b, out);
    CHECK(out(0, 0) == 58);
    CHECK(out(0, 1) == 64);
    CHECK(out(1, 0) == 139);
    CHECK(out(1, 1) == 154);
}

TEST_CASE("transpose and colsum agree between variants") {
    Rng rng(11);
    Matrix a = random_matrix(37, 53, rng);
    Matrix t_serial, t_omp;
    kernels::serial::transpose(a, t_serial);
    kernels::omp::transpose(a, t_omp);
    check_equal(t_serial, t_omp);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) REQUIRE(t_serial(j, i) == a(i, j));

    std::vector<double> s_serial, s_omp;
    kernels::serial::colsum(a, s_serial);
    kernels::omp::colsum(a, s_omp);
    REQUIRE(s_serial == s_omp);
}

TEST_CASE("pairwise cosine distance properties") {
    Rng rng(3);
    Matrix x = random_matrix(19, 8, rng);
    Matrix d_serial, d_omp;
    std::vector<double> inv_serial, inv_omp;
    kernels::serial::pairwise_cosine_distance(x, d_serial, inv_serial);
    kernels::omp::pairwise_cosine_distance(x, d_omp, inv_omp);
    check_equal(d_serial, d_omp);
    REQUIRE(inv_serial.size() == inv_omp.size());
    for (size_t i = 0; i < inv_serial.size(); ++i)
        REQUIRE(inv_serial[i] == doctest::Approx(inv_omp[i]).epsilon(1e-13));

    for (int i = 0; i < x.rows(); ++i) {
        CHECK(d_serial(i, i) == 0.0);
        for (int j = 0; j < x.rows(); ++j) {
            CHECK(d_serial(i, j) == doctest::Approx(d_serial(j, i)).epsilon(1e-12));
            CHECK(d_serial(i, j) >= -1e-12);
            CHECK(d_serial(i, j) <= 2.0 + 1e-12);
        }
    }

    SUBCASE("zero rows are treated as orthogonal to everything") {
        Matrix z(3, 4);
        z(1, 0) = 1.0;
        z(2, 1) = 2.0;
        Matrix dist;
        std::vector<double> inv;
        kernels::pairwise_cosine_distance(z, dist, inv);
        CHECK(inv[0] == 0.0);
        CHECK(dist(0, 1) == 1.0);
        CHECK(dist(0, 2) == 1.0);
        CHECK(dist(1, 2) == doctest::Approx(1.0));  // orthogonal axes
    }
}

TEST_CASE("sq_distance_to_centroids matches direct evaluation") {
    Rng rng(5);
    Matrix x = random_matrix(23, 6, rng);
    Matrix c = random_matrix(4, 6, rng);
    Matrix d_serial, d_omp;
    kernels::serial::sq_distance_to_centroids(x, c, d_serial);
    kernels::omp::sq_distance_to_centroids(x, c, d_omp);
    check_equal(d_serial, d_omp);
    for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < c.rows(); ++j) {
            double expect = 0.0;
            for (int t = 0; t < 6; ++t) {
                const double diff = x(i, t) - c(j, t);
                expect += diff * diff;
            }
            CHECK(d_serial(i, j) == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("backend dispatch switches implementations") {
    Rng rng(9);
    Matrix a = random_matrix(5, 7, rng);
    Matrix b = random_matrix(7, 3, rng);
    Matrix out_parallel, out_serial;
    kernels::set_backend(kernels::Backend::Parallel);
    kernels::matmul(a, b, out_parallel);
    kernels::set_backend(kernels::Backend::Serial);
    kernels::matmul(a, b, out_serial);
    kernels::set_backend(kernels::Backend::Parallel);
    check_equal(out_parallel, out_serial);
}
