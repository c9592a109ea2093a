#pragma once

#include <variant>

#include "vmma/matrix.hpp"

namespace vmma {

// g(w) = (rate / pi) exp(-rate |w|^2); unit mass over the plane.
struct GaussianKernel {
    double rate;
};

// Matern kernel in two dimensions with smoothness alpha and inverse range kappa.
// Only the finite-at-origin regime (alpha - 2) / 2 > 0 is supported.
struct MaternKernel {
    double alpha;
    double kappa;
};

class Kernel {
public:
    Kernel(GaussianKernel g, int truncation, double spacing);
    Kernel(MaternKernel m, int truncation, double spacing);

    static Kernel gaussian(double rate, int truncation, double spacing) {
        return Kernel(GaussianKernel{rate}, truncation, spacing);
    }
    static Kernel matern(double alpha, double kappa, int truncation, double spacing) {
        return Kernel(MaternKernel{alpha, kappa}, truncation, spacing);
    }

    bool is_gaussian() const noexcept { return std::holds_alternative<GaussianKernel>(shape_); }
    const std::variant<GaussianKernel, MaternKernel>& shape() const noexcept { return shape_; }
    int truncation() const noexcept { return p_; }
    double spacing() const noexcept { return spacing_; }
    double range() const noexcept { return p_ * spacing_; }

    double eval(double w1, double w2) const;
    // Integral of g^2 over the plane; computed once at construction for Matern.
    double squared_l2_mass() const { return l2_; }

private:
    std::variant<GaussianKernel, MaternKernel> shape_;
    int p_;
    double spacing_;
    double l2_ = 0.0;
};

// (2p+1) x (2p+1) sampled kernel. Row r holds w2 = (r - p) * spacing, column c
// holds w1 = (p - c) * spacing, so g(0, 0) sits in the centre.
class KernelMatrix {
public:
    KernelMatrix(Matrix entries, double spacing);

    int half_width() const noexcept { return static_cast<int>(entries_.rows() - 1) / 2; }
    int side() const noexcept { return static_cast<int>(entries_.rows()); }
    double spacing() const noexcept { return spacing_; }
    const Matrix& entries() const noexcept { return entries_; }
    double operator()(std::size_t r, std::size_t c) const { return entries_(r, c); }

    KernelMatrix squared() const;
    double sum() const;

private:
    Matrix entries_;
    double spacing_;
};

KernelMatrix kernel_matrix(const Kernel& k);

double eval(const Kernel& k, double w1, double w2);
double squared_l2_mass(const Kernel& k);

}  // namespace vmma
