#include "vmma/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "vmma/error.hpp"

namespace vmma {

namespace {

using std::numbers::pi;

// Summed-area tables over the observed cells of a field.
class BoxSums {
public:
    BoxSums(const Field& f, double shift) : cols_(f.cols() + 1) {
        const std::size_t rows = f.rows() + 1;
        count_.assign(rows * cols_, 0.0L);
        s1_.assign(rows * cols_, 0.0L);
        s2_.assign(rows * cols_, 0.0L);
        for (std::size_t i = 0; i < f.rows(); ++i)
            for (std::size_t j = 0; j < f.cols(); ++j) {
                long double c = 0.0L, v = 0.0L;
                if (f.observed(i, j)) {
                    c = 1.0L;
                    v = static_cast<long double>(f(i, j)) - shift;
                }
                const std::size_t k = (i + 1) * cols_ + (j + 1);
                const std::size_t up = i * cols_ + (j + 1), left = (i + 1) * cols_ + j, diag = i * cols_ + j;
                count_[k] = c + count_[up] + count_[left] - count_[diag];
                s1_[k] = v + s1_[up] + s1_[left] - s1_[diag];
                s2_[k] = v * v + s2_[up] + s2_[left] - s2_[diag];
            }
    }

    struct Box {
        long double n, s1, s2;
    };

    Box box(std::size_t top, std::size_t left, std::size_t q) const {
        return {rect(count_, top, left, q), rect(s1_, top, left, q), rect(s2_, top, left, q)};
    }

private:
    long double rect(const std::vector<long double>& t, std::size_t top, std::size_t left, std::size_t q) const {
        const std::size_t b = top + q, r = left + q;
        return t[b * cols_ + r] - t[top * cols_ + r] - t[b * cols_ + left] + t[top * cols_ + left];
    }

    std::size_t cols_;
    std::vector<long double> count_, s1_, s2_;
};

Grid window_output_grid(const Field& f, Window w) {
    const auto q = static_cast<std::size_t>(w.q());
    if (q > f.rows() || q > f.cols())
        throw ParameterError("window side " + std::to_string(w.q()) + " exceeds field size " +
                             std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
    const auto& g = f.grid();
    const double shift = w.half() * g.spacing();
    return Grid({g.origin().x1 + shift, g.origin().x2 + shift}, g.spacing(), f.rows() - q + 1,
                f.cols() - q + 1);
}

enum class WindowStat { MeanSquare, SampleVariance };

Field window_statistic(const Field& f, const BoxSums& sums, Window w, WindowStat stat, int min_count = 2) {
    const Grid out_grid = window_output_grid(f, w);
    Field out(out_grid);
    const auto q = static_cast<std::size_t>(w.q());
    for (std::size_t i = 0; i < out_grid.rows(); ++i)
        for (std::size_t j = 0; j < out_grid.cols(); ++j) {
            const auto b = sums.box(i, j, q);
            if (b.n < min_count - 0.5L) {
                out.set_missing(i, j);
                continue;
            }
            double v;
            if (stat == WindowStat::MeanSquare)
                v = static_cast<double>(b.s2 / b.n);
            else
                v = static_cast<double>((b.s2 - b.s1 * b.s1 / b.n) / (b.n - 1.0L));
            out.set(i, j, std::max(v, 0.0));
        }
    return out;
}

// Minimises sum_k (target_k - 2 (1 - exp(-c * scale * d_k^2)))^2 over c by
// golden-section search on log c.
double fit_rate(const EmpiricalVariogram& v, int n_lags, double scale) {
    if (n_lags < 1) throw ParameterError("least-squares fit needs at least one lag");
    if (static_cast<std::size_t>(n_lags) > v.values.size())
        throw ParameterError("variogram has " + std::to_string(v.values.size()) + " lags, fit needs " +
                             std::to_string(n_lags));
    auto sse = [&](double log_c) {
        const double c = std::exp(log_c);
        double s = 0.0;
        for (int k = 0; k < n_lags; ++k) {
            const double d = v.lags[k];
            const double r = v.values[k] - 2.0 * (1.0 - std::exp(-c * scale * d * d));
            s += r * r;
        }
        return s;
    };
    const double lo0 = std::log(1e-6), hi0 = std::log(1e3);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = lo0, hi = hi0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = sse(x1), f2 = sse(x2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = sse(x2);
        }
    }
    const double x = 0.5 * (lo + hi);
    if (x - lo0 < 1e-6 || hi0 - x < 1e-6)
        throw NumericalError("variogram fit has no interior minimum in [1e-6, 1e3] (reached " +
                             std::to_string(std::exp(x)) + ")");
    return std::exp(x);
}

// Rate c with gamma(d) = 2 (1 - exp(-c d^2)) at the first lag.
double first_lag_rate(const EmpiricalVariogram& v) {
    if (v.values.empty()) throw DataError("variogram has no lags");
    if (std::abs(v.lags[0] - v.spacing) > 1e-12 * v.spacing)
        throw DataError("variogram has no pairs at the first lag");
    const double g = v.values[0];
    if (!(g > 0.0)) throw DataError("first-lag variogram is not positive");
    if (!(g < 2.0))
        throw NumericalError("first-lag variogram " + std::to_string(g) + " >= 2 cannot be inverted");
    return -std::log1p(-g / 2.0) / (v.spacing * v.spacing);
}

}  // namespace

EmpiricalVariogram empirical_variogram(const Field& f, int max_lag) {
    if (max_lag < 1) throw ParameterError("max_lag must be at least 1");
    EmpiricalVariogram v;
    v.spacing = f.spacing();
    v.variance = masked_variance(f);
    if (!(v.variance > 0.0)) throw DataError("field has zero variance; variogram is undefined");
    for (int k = 1; k <= max_lag; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < f.rows(); ++i)
            for (std::size_t j = 0; j < f.cols(); ++j) {
                if (!f.observed(i, j)) continue;
                if (j + uk < f.cols() && f.observed(i, j + uk)) {
                    const double d = f(i, j + uk) - f(i, j);
                    s += d * d;
                    ++n;
                }
                if (i + uk < f.rows() && f.observed(i + uk, j)) {
                    const double d = f(i + uk, j) - f(i, j);
                    s += d * d;
                    ++n;
                }
            }
        if (n == 0) continue;
        v.lags.push_back(k * v.spacing);
        v.values.push_back(s / static_cast<double>(n) / v.variance);
        v.pairs.push_back(n);
    }
    if (v.lags.empty()) throw DataError("no observed pairs at any lag");
    return v;
}

double estimate_lambda_first_lag(const EmpiricalVariogram& v) { return 2.0 * first_lag_rate(v); }

double estimate_lambda_lsq(const EmpiricalVariogram& v, int n_lags) { return fit_rate(v, n_lags, 0.5); }

double estimate_a(double kappa2_hat, double lambda_hat) {
    if (!(lambda_hat > 0.0)) throw ParameterError("rate estimate must be positive");
    return 2.0 * pi * kappa2_hat / lambda_hat;
}

double estimate_a2(double mean_local_variance, double lambda_hat) {
    return estimate_a(mean_local_variance, lambda_hat);
}

Field local_variance_field(const Field& f, Window w) {
    const BoxSums sums(f, 0.0);
    return window_statistic(f, sums, w, WindowStat::MeanSquare);
}

Field regional_variance_field(const Field& f, Window w) {
    // Centring first keeps the one-pass variance formula accurate.
    const BoxSums sums(f, f.count_observed() ? masked_mean(f) : 0.0);
    return window_statistic(f, sums, w, WindowStat::SampleVariance);
}

MrvCurve mrv_curve(const Field& f, int q_min, int q_max) {
    if (q_min % 2 == 0 || q_max % 2 == 0) throw ParameterError("q range bounds must be odd");
    if (q_min > q_max) throw ParameterError("empty q range");
    (void)Window(q_min);
    const BoxSums sums(f, f.count_observed() ? masked_mean(f) : 0.0);
    MrvCurve c;
    for (int q = q_min; q <= q_max; q += 2) {
        const Window w(q);
        const Field rv = window_statistic(f, sums, w, WindowStat::SampleVariance);
        double best = -1.0;
        std::pair<std::size_t, std::size_t> at{0, 0};
        for (std::size_t i = 0; i < rv.rows(); ++i)
            for (std::size_t j = 0; j < rv.cols(); ++j)
                if (rv.observed(i, j) && rv(i, j) > best) {
                    best = rv(i, j);
                    at = {i + static_cast<std::size_t>(w.half()), j + static_cast<std::size_t>(w.half())};
                }
        if (best < 0.0) throw DataError("no window of side " + std::to_string(q) + " has two observed cells");
        c.qs.push_back(q);
        c.values.push_back(best);
        c.centers.push_back(at);
    }
    return c;
}

QSelection select_q(const MrvCurve& curve) {
    if (curve.values.empty()) throw ParameterError("empty MRV curve");
    for (std::size_t k = 1; k + 1 < curve.values.size(); ++k)
        if (curve.values[k] > curve.values[k - 1] && curve.values[k] > curve.values[k + 1])
            return {curve.qs[k], true};
    const auto it = std::max_element(curve.values.begin(), curve.values.end());
    return {curve.qs[static_cast<std::size_t>(it - curve.values.begin())], false};
}

std::string FitMethod::tag() const {
    return kind == FitKind::FirstLag ? "first-lag" : "lsq:" + std::to_string(lags);
}

FitMethod parse_fit_method(const std::string& s) {
    if (s == "first-lag") return {FitKind::FirstLag, 1};
    if (s.rfind("lsq:", 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(s.substr(4), &used);
            if (used != s.size() - 4) k = 0;
        } catch (const std::exception&) {
            k = 0;
        }
        if (k < 1) throw ParameterError("bad lag count in fit method '" + s + "'");
        return {FitKind::LeastSquares, k};
    }
    throw ParameterError("unknown fit method '" + s + "' (expected first-lag or lsq:<k>)");
}

VolatilityEstimates invert_volatility_moments(double A, double B, double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("rate estimate must be positive");
    if (!(B > 0.0)) throw DataError("volatility decay estimate must be positive");
    if (!(lambda > B))
        throw NumericalError("volatility decay " + std::to_string(B) + " is not below the field rate " +
                             std::to_string(lambda) + "; eta cannot be recovered");
    VolatilityEstimates e{};
    e.A = A;
    e.B = B;
    e.b = 4.0 * pi * pi * pi * A / (lambda * lambda * B);
    e.eta = 2.0 * lambda * B / (lambda - B);
    return e;
}

double estimate_volatility_decay(const EmpiricalVariogram& psi, const FitMethod& fit) {
    return fit.kind == FitKind::FirstLag ? first_lag_rate(psi) : fit_rate(psi, fit.lags, 1.0);
}

VolatilityEstimates estimate_volatility_params(const Field& local_variance, double lambda_hat,
                                               const FitMethod& fit, EmpiricalVariogram* variogram_out) {
    if (!(lambda_hat > 0.0)) throw ParameterError("rate estimate must be positive");
    const int lags = fit.kind == FitKind::FirstLag ? 1 : fit.lags;
    const EmpiricalVariogram psi = empirical_variogram(local_variance, std::max(lags, 5));
    if (variogram_out) *variogram_out = psi;
    return invert_volatility_moments(psi.variance, estimate_volatility_decay(psi, fit), lambda_hat);
}

EstimationReport run_two_step(const Field& f, const TwoStepConfig& cfg) {
    EstimationReport r;
    r.fit_tag = cfg.fit.tag();
    r.q_fixed = cfg.fixed_q.has_value();
    std::string stage;
    try {
        stage = "variogram";
        const int lags = std::max({cfg.report_lags, cfg.fit.lags, 1});
        r.variogram_y = empirical_variogram(f, lags);
        r.kappa2_hat = r.variogram_y->variance;

        stage = "rate";
        r.lambda_hat = cfg.fit.kind == FitKind::FirstLag ? estimate_lambda_first_lag(*r.variogram_y)
                                                         : estimate_lambda_lsq(*r.variogram_y, cfg.fit.lags);
        r.a_hat = estimate_a(*r.kappa2_hat, *r.lambda_hat);

        stage = "window";
        int q_max = cfg.q_max;
        const int side = static_cast<int>(std::min(f.rows(), f.cols()));
        if (q_max > side) {
            q_max = side % 2 ? side : side - 1;
            r.warnings.push_back("q_max reduced to " + std::to_string(q_max) + " to fit the field");
        }
        if (q_max >= cfg.q_min) r.mrv = mrv_curve(f, cfg.q_min, q_max);
        if (cfg.fixed_q) {
            r.q = Window(*cfg.fixed_q).q();
        } else {
            if (!r.mrv) throw ParameterError("q range is empty after fitting it to the field");
            const auto sel = select_q(*r.mrv);
            r.q = sel.q;
            r.peak_found = sel.peak_found;
            if (!sel.peak_found) r.warnings.push_back("no interior MRV peak; using the argmax q");
        }

        stage = "local-variance";
        r.local_variance = local_variance_field(f, Window(*r.q));
        r.a2_hat = estimate_a2(masked_mean(*r.local_variance), *r.lambda_hat);

        stage = "volatility";
        const int psi_lags = std::max({cfg.report_lags, cfg.fit.lags, 1});
        r.variogram_sigma = empirical_variogram(*r.local_variance, psi_lags);
        r.A_hat = r.variogram_sigma->variance;
        r.B_hat = estimate_volatility_decay(*r.variogram_sigma, cfg.fit);
        const auto est = invert_volatility_moments(*r.A_hat, *r.B_hat, *r.lambda_hat);
        r.b_hat = est.b;
        r.eta_hat = est.eta;
    } catch (const Error& e) {
        r.error = e.what();
        r.error_stage = stage;
    }
    return r;
}

}  // namespace vmma
