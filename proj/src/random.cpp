#include "vmma/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vmma/error.hpp"

namespace vmma {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
    std::uint32_t words[8];
    for (int k = 0; k < 4; ++k) {
        const std::uint64_t w = splitmix64(t);
        words[2 * k] = static_cast<std::uint32_t>(w);
        words[2 * k + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words, words + 8);
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : engine_(seeded_engine(seed, stream)) {}

double RngStream::uniform() {
    // 53 random bits, shifted half a step off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw ParameterError("below(0)");
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
}

LevySeed LevySeed::standard_gaussian() {
    LevySeed s;
    s.v_ = GaussianBasis{};
    return s;
}

LevySeed LevySeed::inverse_gaussian(double delta, double gamma) {
    if (!(delta > 0.0) || !(gamma > 0.0) || !std::isfinite(delta) || !std::isfinite(gamma))
        throw ParameterError("inverse Gaussian parameters must be positive");
    LevySeed s;
    s.v_ = InverseGaussianBasis{delta, gamma};
    return s;
}

const InverseGaussianBasis& LevySeed::ig() const {
    if (is_gaussian()) throw ParameterError("seed is not inverse Gaussian");
    return std::get<InverseGaussianBasis>(v_);
}

double LevySeed::mean() const {
    if (is_gaussian()) return 0.0;
    const auto& p = ig();
    return p.delta / p.gamma;
}

double LevySeed::variance() const {
    if (is_gaussian()) return 1.0;
    const auto& p = ig();
    return p.delta / (p.gamma * p.gamma * p.gamma);
}

LevySeed ig_from_moments(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ParameterError("mean and variance of the IG seed must be positive");
    const double gamma = std::sqrt(a / b);
    return LevySeed::inverse_gaussian(a * gamma, gamma);
}

double sample_inverse_gaussian(double mu, double shape, RngStream& rng) {
    const double nu = rng.normal();
    const double y = nu * nu;
    const double r = mu * y / (2.0 * shape);
    // mu * (1 + r - sqrt(r (r + 2))) rewritten to avoid cancellation when r is large.
    const double root_term = 1.0 + r + std::sqrt(r * (r + 2.0));
    const double x = mu / root_term;
    if (rng.uniform() <= mu / (mu + x)) return x;
    return mu * root_term;
}

Field sample_cell_increments(const LevySeed& seed, const Grid& grid, RngStream& rng) {
    Field out(grid);
    const double area = grid.spacing() * grid.spacing();
    auto data = out.mutable_values().data();
    if (seed.is_gaussian()) {
        const double sd = std::sqrt(area);
        for (auto& v : data) v = sd * rng.normal();
    } else {
        const auto& p = seed.ig();
        // Cell law IG(delta * area, gamma): mean mu, shape (delta * area)^2.
        const double d = p.delta * area;
        const double mu = d / p.gamma;
        const double shape = d * d;
        for (auto& v : data) v = sample_inverse_gaussian(mu, shape, rng);
    }
    return out;
}

double laplace_exponent(const LevySeed& seed, double theta) {
    if (theta < 0.0) throw ParameterError("Laplace exponent needs theta >= 0");
    if (seed.is_gaussian()) return 0.5 * theta * theta;
    const auto& p = seed.ig();
    // delta * (gamma - sqrt(gamma^2 + 2 theta)), written stably for small theta.
    const double g = p.gamma;
    const double s = std::sqrt(g * g + 2.0 * theta);
    return -p.delta * 2.0 * theta / (g + s);
}

}  // namespace vmma
