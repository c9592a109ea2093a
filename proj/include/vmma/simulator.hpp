#pragma once

#include <cstdint>
#include <optional>

#include "vmma/grid.hpp"
#include "vmma/random.hpp"

namespace vmma {

// Field kernel Gaussian(lambda) truncated at p cells, volatility kernel
// Gaussian(eta) truncated at ptilde cells, IG Levy seed for the volatility.
struct ModelParams {
    double lambda = 4.0;
    double eta = 4.0;
    LevySeed levy = ig_from_moments(1.0, 2.0);
    double delta = 0.05;
    int n = 201;
    int p = 30;
    int ptilde = 30;
    Point origin{0.0, 0.0};

    void validate() const;
    Grid output_grid() const;
    // Grid carrying sigma^2, grown by p cells per side.
    Grid volatility_grid() const;
};

struct SimulationOutput {
    Field y;
    Field sigma2;
    std::optional<Field> gma;
};

// sigma^2 on the (N+2p)^2 volatility grid, from IG increments on a grid grown
// by a further ptilde cells per side.
Field simulate_volatility(const ModelParams& params, RngStream& rng);

// Volatility from stream (seed, Volatility), driving noise from (seed, Noise).
// The coupled GMA reuses the noise scaled by sqrt(a).
SimulationOutput simulate_vmma(const ModelParams& params, std::uint64_t seed, bool with_gma);
SimulationOutput simulate_vmma(const ModelParams& params, RngStream& vol_rng, RngStream& noise_rng,
                               bool with_gma);

// Var(Y(x) | sigma^2) for the discrete simulation: squared kernel convolved
// with sigma^2, times the cell area.
Field conditional_variance_surface(const ModelParams& params, const Field& sigma2);

}  // namespace vmma
