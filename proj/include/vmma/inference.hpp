#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vmma/grid.hpp"

namespace vmma {

// Normalised variogram at axis-aligned lags k * spacing, k = 1..max_lag, with
// horizontal and vertical pairs pooled.
struct EmpiricalVariogram {
    double spacing = 0.0;
    double variance = 0.0;
    std::vector<double> lags;
    std::vector<double> values;
    std::vector<std::size_t> pairs;
};

EmpiricalVariogram empirical_variogram(const Field& f, int max_lag);

// Inverse of gamma(d) = 2 (1 - exp(-lambda d^2 / 2)) at the first lag.
double estimate_lambda_first_lag(const EmpiricalVariogram& v);
// Least-squares fit of the same curve over the first n_lags lags.
double estimate_lambda_lsq(const EmpiricalVariogram& v, int n_lags);

double estimate_a(double kappa2_hat, double lambda_hat);
double estimate_a2(double mean_local_variance, double lambda_hat);

// Windowed mean of f^2 over observed cells. Output row r covers input rows
// r..r+q-1; windows with fewer than two observed cells are missing.
Field local_variance_field(const Field& f, Window w);
// Windowed sample variance (denominator n - 1) with the window mean removed.
Field regional_variance_field(const Field& f, Window w);

struct MrvCurve {
    std::vector<int> qs;
    std::vector<double> values;
    // Centre of the maximising window, in input-field coordinates.
    std::vector<std::pair<std::size_t, std::size_t>> centers;
};

MrvCurve mrv_curve(const Field& f, int q_min, int q_max);

struct QSelection {
    int q;
    bool peak_found;
};

// Smallest q that is a strict interior local maximum; argmax otherwise.
QSelection select_q(const MrvCurve& curve);

enum class FitKind { FirstLag, LeastSquares };

struct FitMethod {
    FitKind kind = FitKind::FirstLag;
    int lags = 1;

    std::string tag() const;
};

// "first-lag" or "lsq:<k>".
FitMethod parse_fit_method(const std::string& s);

struct VolatilityEstimates {
    double A;
    double B;
    double b;
    double eta;
};

// Inverts A = b lambda^3 eta / (4 pi^3 (2 lambda + eta)) and B = lambda eta / (2 lambda + eta).
VolatilityEstimates invert_volatility_moments(double A, double B, double lambda);

// B from the normalised variogram of the local variances, by the chosen fit.
double estimate_volatility_decay(const EmpiricalVariogram& psi, const FitMethod& fit);

VolatilityEstimates estimate_volatility_params(const Field& local_variance, double lambda_hat,
                                               const FitMethod& fit,
                                               EmpiricalVariogram* variogram_out = nullptr);

struct TwoStepConfig {
    int q_min = 9;
    int q_max = 51;
    FitMethod fit{};
    std::optional<int> fixed_q;
    // Lags tabulated in the report; at least the number the fit needs.
    int report_lags = 5;
};

struct EstimationReport {
    std::string fit_tag;
    std::optional<double> kappa2_hat;
    std::optional<double> lambda_hat;
    std::optional<double> a_hat;
    std::optional<double> a2_hat;
    std::optional<double> A_hat;
    std::optional<double> B_hat;
    std::optional<double> b_hat;
    std::optional<double> eta_hat;
    std::optional<int> q;
    bool q_fixed = false;
    bool peak_found = true;
    std::optional<MrvCurve> mrv;
    std::optional<Field> local_variance;
    std::optional<EmpiricalVariogram> variogram_y;
    std::optional<EmpiricalVariogram> variogram_sigma;
    std::vector<std::string> warnings;
    // Set when a stage failed; later fields stay empty.
    std::optional<std::string> error;
    std::optional<std::string> error_stage;
    bool ok() const { return !error.has_value(); }
};

EstimationReport run_two_step(const Field& f, const TwoStepConfig& cfg);

}  // namespace vmma
