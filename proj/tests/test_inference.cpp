#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vmma/error.hpp"
#include "vmma/inference.hpp"
#include "vmma/moments.hpp"
#include "vmma/random.hpp"
#include "vmma/simulator.hpp"

using namespace vmma;
using std::numbers::pi;

namespace {

Field filled(std::size_t rows, std::size_t cols, double spacing, auto fn) {
    Field f(make_grid({0, 0}, spacing, static_cast<long>(rows), static_cast<long>(cols)));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) f.set(i, j, fn(i, j));
    return f;
}

EmpiricalVariogram model_variogram(double rate, double spacing, int lags, double c_scale) {
    EmpiricalVariogram v;
    v.spacing = spacing;
    v.variance = 1.0;
    for (int k = 1; k <= lags; ++k) {
        const double d = k * spacing;
        v.lags.push_back(d);
        v.values.push_back(-2.0 * std::expm1(-rate * c_scale * d * d));
        v.pairs.push_back(100);
    }
    return v;
}

// Brute-force window statistics through the generic window view.
Field brute_regional(const Field& f, int q) {
    const auto range = window_iter(f, Window(q));
    Field out(make_grid({0, 0}, f.spacing(), static_cast<long>(range.out_rows()), static_cast<long>(range.out_cols())));
    std::size_t k = 0;
    for (const WindowView w : range) {
        double s = 0.0, n = 0.0;
        for (int r = 0; r < q; ++r)
            for (int c = 0; c < q; ++c)
                if (w.observed(r, c)) {
                    s += w(r, c);
                    n += 1;
                }
        const std::size_t i = k / range.out_cols(), j = k % range.out_cols();
        if (n < 2) {
            out.set_missing(i, j);
        } else {
            const double m = s / n;
            double ss = 0.0;
            for (int r = 0; r < q; ++r)
                for (int c = 0; c < q; ++c)
                    if (w.observed(r, c)) ss += (w(r, c) - m) * (w(r, c) - m);
            out.set(i, j, ss / (n - 1));
        }
        ++k;
    }
    return out;
}

}  // namespace

TEST_CASE("variogram of a constant field is undefined") {
    const Field f = filled(10, 10, 0.1, [](auto, auto) { return 3.0; });
    CHECK_THROWS_AS(empirical_variogram(f, 3), DataError);
}

TEST_CASE("variogram of white noise is about two") {
    RngStream r(1, 0);
    const Field f = filled(200, 200, 0.1, [&](auto, auto) { return r.normal(); });
    const auto v = empirical_variogram(f, 4);
    REQUIRE(v.lags.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(v.lags[k] == doctest::Approx(0.1 * static_cast<double>(k + 1)));
        CHECK(v.values[k] == doctest::Approx(2.0).epsilon(0.03));
        CHECK(v.pairs[k] == 2u * 200u * (200u - (k + 1)));
    }
}

TEST_CASE("variogram pairs skip missing cells") {
    Field f = filled(3, 3, 1.0, [](auto i, auto j) { return static_cast<double>(i * 3 + j); });
    f.set_missing(1, 1);
    const auto v = empirical_variogram(f, 2);
    // Lag 1: 12 axis pairs, 4 touch the centre.
    CHECK(v.pairs[0] == 8u);
    CHECK(v.pairs[1] == 6u);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j + 1 < 3; ++j)
            if (f.observed(i, j) && f.observed(i, j + 1)) s += 1.0;
    for (std::size_t i = 0; i + 1 < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (f.observed(i, j) && f.observed(i + 1, j)) s += 9.0;
    CHECK(v.values[0] == doctest::Approx(s / 8.0 / masked_variance(f)));
}

TEST_CASE("first-lag rate inversion is exact") {
    for (double d : {0.01, 0.05, 0.1})
        for (double lambda : {0.01, 0.5, 4.0, 17.0, 63.0, 100.0}) {
            const auto v = model_variogram(lambda, d, 1, 0.5);
            CHECK(std::abs(estimate_lambda_first_lag(v) - lambda) <= 1e-10 * lambda);
        }
    EmpiricalVariogram v = model_variogram(4.0, 0.05, 1, 0.5);
    v.values[0] = 0.009975;
    CHECK(estimate_lambda_first_lag(v) == doctest::Approx(4.0).epsilon(1e-3));
    v.values[0] = 2.1;
    CHECK_THROWS_AS(estimate_lambda_first_lag(v), NumericalError);
    v.values[0] = 0.0;
    CHECK_THROWS_AS(estimate_lambda_first_lag(v), DataError);
}

TEST_CASE("least-squares rate fit") {
    const auto v = model_variogram(4.0, 0.05, 5, 0.5);
    CHECK(estimate_lambda_lsq(v, 5) == doctest::Approx(4.0).epsilon(1e-6));
    // One lag reduces to the first-lag inverse.
    EmpiricalVariogram w = v;
    w.values[0] *= 1.03;
    CHECK(estimate_lambda_lsq(w, 1) == doctest::Approx(estimate_lambda_first_lag(w)).epsilon(1e-8));
    // One percent perturbations.
    RngStream r(77, 0);
    EmpiricalVariogram noisy = model_variogram(4.0, 0.05, 5, 0.5);
    for (auto& x : noisy.values) x *= 1.0 + 0.01 * (2.0 * r.uniform() - 1.0);
    CHECK(estimate_lambda_lsq(noisy, 5) == doctest::Approx(4.0).epsilon(0.05));
    CHECK_THROWS_AS(estimate_lambda_lsq(v, 6), ParameterError);
    // Flat variogram at 2: optimum runs to the upper end of the bracket.
    EmpiricalVariogram flat = v;
    for (auto& x : flat.values) x = 2.0;
    CHECK_THROWS_AS(estimate_lambda_lsq(flat, 5), NumericalError);
}

TEST_CASE("amplitude estimator") {
    CHECK(estimate_a(2.0 / pi, 4.0) == doctest::Approx(1.0));
    CHECK(estimate_a(0.0, 4.0) == 0.0);
    CHECK(estimate_a2(2.0 / pi, 4.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(estimate_a(1.0, 0.0), ParameterError);
}

TEST_CASE("local variance is the window mean of squares") {
    const Field c = filled(9, 9, 0.1, [](auto, auto) { return -1.5; });
    const Field lc = local_variance_field(c, Window(3));
    CHECK(lc.rows() == 7);
    for (double v : lc.values().data()) CHECK(v == doctest::Approx(2.25));
    const Field alt = filled(8, 8, 0.1, [](auto i, auto j) { return (i + j) % 2 ? 1.0 : -1.0; });
    const Field la = local_variance_field(alt, Window(5));
    for (double v : la.values().data()) CHECK(v == doctest::Approx(1.0));
    CHECK(lc.grid().origin().x1 == doctest::Approx(0.1));
    CHECK_THROWS_AS(local_variance_field(c, Window(11)), ParameterError);
}

TEST_CASE("regional variance of a ramp window") {
    const int q = 5;
    const Field f = filled(q, q, 1.0, [](auto i, auto j) { return static_cast<double>(i * q + j); });
    const Field rv = regional_variance_field(f, Window(q));
    REQUIRE(rv.rows() == 1);
    // Sample variance of 0..n-1 is n (n + 1) / 12.
    const double n = q * q;
    CHECK(rv(0, 0) == doctest::Approx(n * (n + 1) / 12.0));
    const Field c = filled(6, 6, 1.0, [](auto, auto) { return 4.0; });
    const Field rc = regional_variance_field(c, Window(3));
    for (double v : rc.values().data()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("local and regional variances agree through the mean identity") {
    RngStream r(12, 0);
    const Field f = filled(30, 25, 0.1, [&](auto, auto) { return 0.7 + r.normal(); });
    const int q = 7;
    const Field lv = local_variance_field(f, Window(q));
    const Field rv = regional_variance_field(f, Window(q));
    const double n = q * q;
    for (std::size_t i = 0; i < lv.rows(); ++i)
        for (std::size_t j = 0; j < lv.cols(); ++j) {
            double s = 0.0;
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b) s += f(i + a, j + b);
            const double m = s / n;
            CHECK(lv(i, j) == doctest::Approx(rv(i, j) * (n - 1) / n + m * m).epsilon(1e-10));
            CHECK(lv(i, j) >= 0.0);
        }
}

TEST_CASE("fast window statistics match brute force with missing cells") {
    RngStream r(13, 0);
    Field f = filled(20, 17, 0.1, [&](auto, auto) { return 5.0 + r.normal(); });
    for (int k = 0; k < 80; ++k) f.set_missing(r.below(20), r.below(17));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) f.set_missing(i, j);
    const Field fast = regional_variance_field(f, Window(5));
    const Field slow = brute_regional(f, 5);
    CHECK(fast.mask() == slow.mask());
    CHECK_FALSE(fast.observed(0, 0));
    for (std::size_t i = 0; i < fast.rows(); ++i)
        for (std::size_t j = 0; j < fast.cols(); ++j)
            if (slow.observed(i, j)) CHECK(fast(i, j) == doctest::Approx(slow(i, j)).epsilon(1e-10));
}

TEST_CASE("MRV curve and q selection") {
    RngStream r(14, 0);
    const Field f = filled(120, 120, 0.1, [&](auto, auto) { return r.normal(); });
    const auto c = mrv_curve(f, 15, 51);
    CHECK(c.qs.front() == 15);
    CHECK(c.qs.back() == 51);
    CHECK(c.qs.size() == 19);
    // White noise: the maximum regional variance shrinks toward 1 as windows grow.
    CHECK(c.values.back() < c.values.front());
    for (double v : c.values) CHECK(v > 1.0);
    CHECK(mrv_curve(f, 21, 21).qs.size() == 1);
    CHECK_THROWS_AS(mrv_curve(f, 21, 19), ParameterError);
    CHECK_THROWS_AS(mrv_curve(f, 20, 30), ParameterError);
}

TEST_CASE("q selection prefers the first strict interior peak") {
    MrvCurve c;
    c.qs = {9, 11, 13, 15, 17};
    c.values = {1, 3, 2, 5, 1};
    auto s = select_q(c);
    CHECK(s.q == 11);
    CHECK(s.peak_found);
    c.values = {1, 2, 3, 4, 5};
    s = select_q(c);
    CHECK(s.q == 17);
    CHECK_FALSE(s.peak_found);
    c.values = {1, 3, 3, 2, 1};  // plateau is not a strict peak
    s = select_q(c);
    CHECK_FALSE(s.peak_found);
    CHECK(s.q == 11);
}

TEST_CASE("fit method parsing") {
    CHECK(parse_fit_method("first-lag").kind == FitKind::FirstLag);
    const auto m = parse_fit_method("lsq:5");
    CHECK(m.kind == FitKind::LeastSquares);
    CHECK(m.lags == 5);
    CHECK(m.tag() == "lsq:5");
    CHECK_THROWS_AS(parse_fit_method("lsq:0"), ParameterError);
    CHECK_THROWS_AS(parse_fit_method("lsq:x"), ParameterError);
    CHECK_THROWS_AS(parse_fit_method("median"), ParameterError);
}

TEST_CASE("volatility moment inversion round-trips") {
    const auto e = invert_volatility_moments(32.0 / (3.0 * pi * pi * pi), 4.0 / 3.0, 4.0);
    CHECK(e.b == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.eta == doctest::Approx(4.0).epsilon(1e-12));
    for (double l : {0.5, 2.0, 4.0, 9.0, 20.0})
        for (double eta : {0.2, 1.0, 4.0, 10.0, 50.0})
            for (double b : {0.01, 0.5, 2.0, 5.0, 40.0}) {
                const auto m = theoretical_moments(l, eta, 1.0, b);
                const auto r = invert_volatility_moments(m.A, m.B, l);
                CHECK(std::abs(r.b - b) <= 1e-8 * b);
                CHECK(std::abs(r.eta - eta) <= 1e-8 * eta);
            }
    CHECK_THROWS_AS(invert_volatility_moments(0.3, 4.0, 4.0), NumericalError);
    CHECK_THROWS_AS(invert_volatility_moments(0.3, 0.0, 4.0), DataError);
}

TEST_CASE("volatility decay fit matches first lag on exact curves") {
    const auto psi = model_variogram(4.0 / 3.0, 0.05, 5, 1.0);
    CHECK(estimate_volatility_decay(psi, {FitKind::FirstLag, 1}) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(estimate_volatility_decay(psi, {FitKind::LeastSquares, 5}) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("two-step estimation on a simulated field fills every stage") {
    ModelParams m;
    m.n = 121;
    const auto sim = simulate_vmma(m, 2, false);
    const auto r = run_two_step(sim.y, TwoStepConfig{});
    REQUIRE(r.ok());
    CHECK(*r.lambda_hat > 2.0);
    CHECK(*r.lambda_hat < 8.0);
    CHECK(r.a_hat.has_value());
    CHECK(r.a2_hat.has_value());
    CHECK(r.b_hat.has_value());
    CHECK(r.eta_hat.has_value());
    CHECK(r.mrv->qs.size() == 22);
    CHECK(*r.q % 2 == 1);
    CHECK(r.local_variance->rows() == 121 - static_cast<std::size_t>(*r.q) + 1);
    CHECK(r.variogram_y->values[0] ==
          doctest::Approx(2.0 * (1.0 - std::exp(-*r.lambda_hat * 0.0025 / 2.0))).epsilon(1e-12));

    TwoStepConfig fixed;
    fixed.fixed_q = 21;
    fixed.fit = parse_fit_method("lsq:5");
    const auto rf = run_two_step(sim.y, fixed);
    REQUIRE(rf.ok());
    CHECK(*rf.q == 21);
    CHECK(rf.q_fixed);
    CHECK(rf.fit_tag == "lsq:5");
}

TEST_CASE("two-step estimation records the failing stage") {
    const Field c = filled(60, 60, 0.05, [](auto, auto) { return 1.0; });
    const auto r = run_two_step(c, TwoStepConfig{});
    CHECK_FALSE(r.ok());
    CHECK(*r.error_stage == "variogram");
    CHECK_FALSE(r.lambda_hat.has_value());
    // White noise has a first-lag variogram near 2; the rate is huge but finite.
    RngStream rng(3, 0);
    const Field w = filled(60, 60, 0.05, [&](auto, auto) { return rng.normal(); });
    TwoStepConfig bad;
    bad.fixed_q = 4;
    const auto rb = run_two_step(w, bad);
    CHECK_FALSE(rb.ok());
    CHECK(*rb.error_stage == "window");
}

TEST_CASE("local variances track the conditional variance as windows grow on a refining grid") {
    // Window half-width Q doubles while the spacing shrinks like Q^(-1/2), so the
    // window side in space grows and the sampling noise of the local average falls.
    std::vector<double> msd;
    for (const int Q : {3, 6, 12}) {
        ModelParams m;
        m.delta = 0.1 * std::sqrt(3.0 / Q);
        m.eta = 0.5;
        m.n = static_cast<int>(std::lround(12.0 / m.delta));
        m.p = static_cast<int>(std::ceil(1.5 / m.delta));
        m.ptilde = static_cast<int>(std::ceil(4.5 / m.delta));
        double total = 0.0;
        std::size_t count = 0;
        for (std::uint64_t s = 1; s <= 4; ++s) {
            const auto sim = simulate_vmma(m, s, false);
            const Field truth = conditional_variance_surface(m, sim.sigma2);
            const Field est = local_variance_field(sim.y, Window(2 * Q + 1));
            for (std::size_t i = 0; i < est.rows(); ++i)
                for (std::size_t j = 0; j < est.cols(); ++j) {
                    const double d = est(i, j) - truth(i + Q, j + Q);
                    total += d * d;
                    ++count;
                }
        }
        msd.push_back(total / static_cast<double>(count));
    }
    MESSAGE("msd " << msd[0] << " " << msd[1] << " " << msd[2]);
    CHECK(msd[1] < msd[0]);
    CHECK(msd[2] < msd[1]);
}
