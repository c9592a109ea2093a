#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vmma/convolution.hpp"
#include "vmma/error.hpp"
#include "vmma/random.hpp"

using namespace vmma;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (auto& v : m.data()) v = rng.normal();
    return m;
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s = std::max(s, std::abs(v));
    return s;
}

double max_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a.data()[k] - b.data()[k]));
    return s;
}

}  // namespace

TEST_CASE("FFT convolution equals direct summation") {
    RngStream rng(42, 0);
    for (int p : {0, 1, 3, 6})
        for (std::size_t n : {1u, 2u, 7u, 20u}) {
            const KernelMatrix k(random_matrix(2 * p + 1, 2 * p + 1, rng), 1.0);
            const Matrix s = random_matrix(n + 2 * p, n + 2 * p, rng);
            const Matrix a = convolve_fft(k, s), b = convolve_direct(k, s);
            REQUIRE(a.rows() == n);
            REQUIRE(a.cols() == n);
            CHECK(max_diff(a, b) <= 1e-12 * std::max(1.0, max_abs(b)));
        }
}

TEST_CASE("rectangular signals are supported") {
    RngStream rng(1, 1);
    const KernelMatrix k(random_matrix(5, 5, rng), 1.0);
    const Matrix s = random_matrix(9, 14, rng);
    const Matrix a = convolve_fft(k, s);
    CHECK(a.rows() == 5);
    CHECK(a.cols() == 10);
    CHECK(max_diff(a, convolve_direct(k, s)) < 1e-12);
}

TEST_CASE("a central spike reproduces the kernel matrix") {
    RngStream rng(8, 0);
    const int p = 3;
    const std::size_t n = 2 * p + 1;
    const KernelMatrix k(random_matrix(n, n, rng), 1.0);
    Matrix s(n + 2 * p, n + 2 * p, 0.0);
    s(n / 2 + p, n / 2 + p) = 1.0;
    const Matrix out = convolve_fft(k, s);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) CHECK(out(r, c) == doctest::Approx(k(r, c)).epsilon(1e-12));
}

TEST_CASE("constant signal gives the kernel sum") {
    const KernelMatrix k = kernel_matrix(Kernel::gaussian(4.0, 4, 0.1));
    const Matrix s(15, 15, 2.5);
    const Matrix out = convolve_fft(k, s);
    for (double v : out.data()) CHECK(v == doctest::Approx(2.5 * k.sum()).epsilon(1e-12));
}

TEST_CASE("1x1 kernel scales the signal") {
    Matrix e(1, 1, 3.0);
    const KernelMatrix k(e, 1.0);
    RngStream rng(2, 2);
    const Matrix s = random_matrix(4, 5, rng);
    const Matrix out = convolve_fft(k, s);
    for (std::size_t t = 0; t < s.size(); ++t) CHECK(out.data()[t] == doctest::Approx(3.0 * s.data()[t]));
}

TEST_CASE("convolution is linear") {
    RngStream rng(3, 3);
    const KernelMatrix k(random_matrix(5, 5, rng), 1.0);
    const Matrix a = random_matrix(12, 12, rng), b = random_matrix(12, 12, rng);
    Matrix sum(12, 12);
    for (std::size_t t = 0; t < sum.size(); ++t) sum.data()[t] = 2.0 * a.data()[t] - b.data()[t];
    const Matrix ca = convolve_fft(k, a), cb = convolve_fft(k, b), cs = convolve_fft(k, sum);
    for (std::size_t t = 0; t < cs.size(); ++t)
        CHECK(cs.data()[t] == doctest::Approx(2.0 * ca.data()[t] - cb.data()[t]).epsilon(1e-10));
}

TEST_CASE("signals too small for the kernel are rejected") {
    const KernelMatrix k(Matrix(5, 5, 1.0), 1.0);
    CHECK_THROWS_AS(convolve_fft(k, Matrix(4, 9)), ParameterError);
    CHECK_THROWS_AS(convolve_direct(k, Matrix(9, 4)), ParameterError);
    CHECK_THROWS_AS(KernelMatrix(Matrix(4, 4), 1.0), ParameterError);
    CHECK_THROWS_AS(KernelMatrix(Matrix(3, 5), 1.0), ParameterError);
}
