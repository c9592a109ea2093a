#include "vmma/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vmma/error.hpp"

namespace vmma {

namespace {

using std::numbers::pi;

void check_common(int truncation, double spacing) {
    if (truncation < 0) throw ParameterError("kernel truncation must be non-negative");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ParameterError("kernel spacing must be positive and finite");
}

double matern_radial(const MaternKernel& m, double r) {
    const double nu = (m.alpha - 2.0) / 2.0;
    const double norm = 4.0 * pi * std::tgamma(m.alpha / 2.0) * std::pow(m.kappa, m.alpha - 2.0);
    const double z = m.kappa * r;
    if (z == 0.0) return std::tgamma(nu) / norm;
    // Underflows long before any sample point of interest.
    if (z > 700.0) return 0.0;
    return std::pow(2.0, 1.0 - nu) * std::pow(z, nu) * std::cyl_bessel_k(nu, z) / norm;
}

double matern_l2(const MaternKernel& m) {
    auto f = [&](double r) {
        const double g = matern_radial(m, r);
        return r * g * g;
    };
    double err = 0.0;
    const double scale = 1.0 / m.kappa;
    // Split at a few correlation lengths so the adaptive rule sees the peak.
    const double inner = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, 8.0 * scale, 15, 1e-12, &err);
    const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 8.0 * scale, std::numeric_limits<double>::infinity(), 15, 1e-12, &err);
    return 2.0 * pi * (inner + outer);
}

}  // namespace

Kernel::Kernel(GaussianKernel g, int truncation, double spacing)
    : shape_(g), p_(truncation), spacing_(spacing) {
    check_common(truncation, spacing);
    if (!(g.rate > 0.0) || !std::isfinite(g.rate))
        throw ParameterError("Gaussian kernel rate must be positive");
    l2_ = g.rate / (2.0 * pi);
}

Kernel::Kernel(MaternKernel m, int truncation, double spacing)
    : shape_(m), p_(truncation), spacing_(spacing) {
    check_common(truncation, spacing);
    if (!(m.kappa > 0.0)) throw ParameterError("Matern kappa must be positive");
    if (!(m.alpha > 1.0)) throw ParameterError("Matern alpha must exceed d/2 = 1");
    if (!(m.alpha > 2.0))
        throw ParameterError("unsupported regime: Matern with (alpha - d)/2 <= 0 is singular at the "
                             "origin, got alpha = " + std::to_string(m.alpha));
    l2_ = matern_l2(m);
}

double Kernel::eval(double w1, double w2) const {
    if (!std::isfinite(w1) || !std::isfinite(w2)) throw ParameterError("kernel argument not finite");
    const double r2 = w1 * w1 + w2 * w2;
    if (const auto* g = std::get_if<GaussianKernel>(&shape_)) return g->rate / pi * std::exp(-g->rate * r2);
    return matern_radial(std::get<MaternKernel>(shape_), std::sqrt(r2));
}

KernelMatrix::KernelMatrix(Matrix entries, double spacing) : entries_(std::move(entries)), spacing_(spacing) {
    if (entries_.rows() != entries_.cols() || entries_.rows() % 2 == 0)
        throw ParameterError("kernel matrix must be square with odd side");
}

KernelMatrix KernelMatrix::squared() const {
    Matrix m = entries_;
    for (auto& v : m.data()) v *= v;
    return KernelMatrix(std::move(m), spacing_);
}

double KernelMatrix::sum() const {
    double s = 0.0;
    for (double v : entries_.data()) s += v;
    return s;
}

KernelMatrix kernel_matrix(const Kernel& k) {
    const int p = k.truncation();
    const double d = k.spacing();
    const auto n = static_cast<std::size_t>(2 * p + 1);
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double w2 = (static_cast<int>(r) - p) * d;
            const double w1 = (p - static_cast<int>(c)) * d;
            m(r, c) = k.eval(w1, w2);
        }
    return KernelMatrix(std::move(m), d);
}

double eval(const Kernel& k, double w1, double w2) { return k.eval(w1, w2); }
double squared_l2_mass(const Kernel& k) { return k.squared_l2_mass(); }

}  // namespace vmma
