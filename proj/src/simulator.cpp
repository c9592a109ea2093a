#include "vmma/simulator.hpp"

#include <cmath>
#include <string>

#include "vmma/convolution.hpp"
#include "vmma/error.hpp"
#include "vmma/kernels.hpp"

namespace vmma {

void ModelParams::validate() const {
    if (!(lambda > 0.0) || !(eta > 0.0)) throw ParameterError("kernel rates must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("spacing must be positive");
    if (n < 1) throw ParameterError("output side must be at least 1");
    if (p < 0 || ptilde < 0) throw ParameterError("truncation must be non-negative");
    if (levy.is_gaussian()) throw ParameterError("volatility seed must be non-negative (inverse Gaussian)");
}

Grid ModelParams::output_grid() const {
    return make_grid(origin, delta, n, n);
}

Grid ModelParams::volatility_grid() const { return output_grid().enlarged(static_cast<std::size_t>(p)); }

Field simulate_volatility(const ModelParams& params, RngStream& rng) {
    params.validate();
    const Grid vol_grid = params.volatility_grid();
    const Grid noise_grid = vol_grid.enlarged(static_cast<std::size_t>(params.ptilde));
    const Field increments = sample_cell_increments(params.levy, noise_grid, rng);
    const KernelMatrix h = kernel_matrix(Kernel::gaussian(params.eta, params.ptilde, params.delta));
    Matrix s2 = convolve_fft(h, increments.values());
    // Round-off can push tiny values below zero; sigma^2 is non-negative.
    for (auto& v : s2.data()) v = std::max(v, 0.0);
    return Field(vol_grid, std::move(s2));
}

SimulationOutput simulate_vmma(const ModelParams& params, RngStream& vol_rng, RngStream& noise_rng,
                               bool with_gma) {
    SimulationOutput out;
    out.sigma2 = simulate_volatility(params, vol_rng);
    const Grid& vg = out.sigma2.grid();
    const double sd = params.delta;
    Matrix noise(vg.rows(), vg.cols());
    for (auto& v : noise.data()) v = sd * noise_rng.normal();

    Matrix driven(vg.rows(), vg.cols());
    const auto s2 = out.sigma2.values().data();
    const auto w = noise.data();
    auto d = driven.data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::sqrt(s2[k]) * w[k];

    const KernelMatrix g = kernel_matrix(Kernel::gaussian(params.lambda, params.p, params.delta));
    out.y = Field(params.output_grid(), convolve_fft(g, driven));
    if (with_gma) {
        const double root_a = std::sqrt(params.levy.mean());
        for (auto& v : noise.data()) v *= root_a;
        out.gma = Field(params.output_grid(), convolve_fft(g, noise));
    }
    return out;
}

SimulationOutput simulate_vmma(const ModelParams& params, std::uint64_t seed, bool with_gma) {
    RngStream vol(seed, Layer::Volatility);
    RngStream noise(seed, Layer::Noise);
    return simulate_vmma(params, vol, noise, with_gma);
}

Field conditional_variance_surface(const ModelParams& params, const Field& sigma2) {
    params.validate();
    const Grid vg = params.volatility_grid();
    if (sigma2.rows() != vg.rows() || sigma2.cols() != vg.cols())
        throw ParameterError("sigma^2 field has the wrong shape for these parameters");
    const KernelMatrix g2 =
        kernel_matrix(Kernel::gaussian(params.lambda, params.p, params.delta)).squared();
    Matrix v = convolve_fft(g2, sigma2.values());
    const double area = params.delta * params.delta;
    for (auto& x : v.data()) x = std::max(x * area, 0.0);
    return Field(params.output_grid(), std::move(v));
}

}  // namespace vmma
