#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "vmma/grid.hpp"

namespace vmma {

// Stream ids used by the simulator; a replicate seed combined with a layer id
// selects one independent generator.
enum class Layer : std::uint64_t { Volatility = 0, Noise = 1, Holdout = 2 };

// Deterministic generator: mt19937_64 seeded from a splitmix64 hash of
// (seed, stream). Uniforms and normals are derived from raw bits so results
// do not depend on the standard library's distribution implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);
    RngStream(std::uint64_t seed, Layer layer) : RngStream(seed, static_cast<std::uint64_t>(layer)) {}

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct GaussianBasis {};

// Inverse Gaussian with density parameters (delta, gamma):
// mean delta / gamma, variance delta / gamma^3 per unit area.
struct InverseGaussianBasis {
    double delta;
    double gamma;
};

class LevySeed {
public:
    static LevySeed standard_gaussian();
    static LevySeed inverse_gaussian(double delta, double gamma);

    bool is_gaussian() const noexcept { return std::holds_alternative<GaussianBasis>(v_); }
    const InverseGaussianBasis& ig() const;
    double mean() const;
    double variance() const;

private:
    std::variant<GaussianBasis, InverseGaussianBasis> v_;
};

// IG seed with per-unit-area mean a and variance b.
LevySeed ig_from_moments(double a, double b);

// One independent increment per cell, each with the seed's law scaled to the
// cell area spacing^2.
Field sample_cell_increments(const LevySeed& seed, const Grid& grid, RngStream& rng);

// Log-Laplace transform per unit area, log E exp(-theta L(A)) / |A|, theta >= 0.
double laplace_exponent(const LevySeed& seed, double theta);

// IG draw with mean mu and shape s (variance mu^3 / s).
double sample_inverse_gaussian(double mu, double shape, RngStream& rng);

}  // namespace vmma
