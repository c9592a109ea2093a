#include "vmma/moments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vmma/error.hpp"

namespace vmma {

namespace {

using std::numbers::pi;

struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_interval(double x, double y) {
    if (y <= x) return 0.0;
    // Work in the tail closest to the interval to keep relative accuracy.
    if (x >= 0.0) return 0.5 * (std::erfc(x / std::numbers::sqrt2) - std::erfc(y / std::numbers::sqrt2));
    if (y <= 0.0) return 0.5 * (std::erfc(-y / std::numbers::sqrt2) - std::erfc(-x / std::numbers::sqrt2));
    return 1.0 - 0.5 * std::erfc(-x / std::numbers::sqrt2) - 0.5 * std::erfc(y / std::numbers::sqrt2);
}

TheoreticalMoments theoretical_moments(double lambda, double eta, double a, double b) {
    require_positive(lambda, "lambda");
    require_positive(eta, "eta");
    require_positive(a, "a");
    if (!(b >= 0.0)) throw ParameterError("b must be non-negative");
    TheoreticalMoments m{};
    m.lambda = lambda;
    m.kappa2 = a * lambda / (2.0 * pi);
    m.kappa3 = 0.0;
    m.A = b * lambda * lambda * lambda * eta / (4.0 * pi * pi * pi * (2.0 * lambda + eta));
    m.B = lambda * eta / (2.0 * lambda + eta);
    m.kappa4 = 3.0 * m.A;
    m.C1 = (b * lambda * eta + a * a * (2.0 * lambda + eta) * pi) * lambda * lambda /
           (2.0 * pi * pi * pi * (2.0 * lambda + eta));
    return m;
}

double correlation(double lambda, double d) {
    if (d < 0.0) throw ParameterError("distance must be non-negative");
    return std::exp(-lambda * d * d / 2.0);
}

double cov_y2(double lambda, double eta, double a, double b, double d) {
    if (d < 0.0) throw ParameterError("distance must be non-negative");
    const auto m = theoretical_moments(lambda, eta, a, b);
    return m.C1 * std::exp(-lambda * d * d) + m.A * std::exp(-m.B * d * d);
}

MseBoundTerms mse_bound(double lambda, double eta, double a, double delta, int p, int ptilde) {
    require_positive(lambda, "lambda");
    require_positive(eta, "eta");
    require_positive(a, "a");
    require_positive(delta, "delta");
    if (p < 0 || ptilde < 0) throw ParameterError("truncation must be non-negative");

    const double d2 = delta * delta;
    // Midpoint sums of the volatility kernel, of g^2, and of g weighted by the
    // Gaussian mass of each cell.
    Kahan sh;
    sh.add(1.0);
    for (int i = 1; i <= ptilde; ++i) sh.add(2.0 * std::exp(-eta * d2 * i * i));
    Kahan sg2, sgp;
    const double s = std::sqrt(2.0 * lambda);
    for (int i = -p; i <= p; ++i) {
        sg2.add(std::exp(-2.0 * lambda * d2 * i * i));
        const double mass = normal_interval(s * (i * delta - delta / 2.0), s * (i * delta + delta / 2.0));
        sgp.add(std::exp(-lambda * d2 * i * i) * mass);
    }
    const double Sh = sh.sum, Sg2 = sg2.sum, Sgp = sgp.sum;
    const double H = eta / pi * d2 * Sh * Sh;

    MseBoundTerms t{};
    t.t2 = a * lambda * eta / (pi * pi) * d2 * Sh * Sh *
           (0.5 + lambda / pi * d2 * Sg2 * Sg2 - 2.0 * Sgp * Sgp);
    t.t4 = a * lambda / (2.0 * pi) * (1.0 - H) * (1.0 - H) / (1.0 + H);
    t.t5 = a * lambda / pi * (1.0 - H) * (0.5 - 2.0 * H / (1.0 + H) * Sgp * Sgp);
    t.lambda = lambda;
    t.eta = eta;
    t.a = a;
    t.delta = delta;
    t.p = p;
    t.ptilde = ptilde;
    return t;
}

ConvergenceProbe convergence_order_probe(const std::vector<double>& schedule, double k, double lambda,
                                         double eta, double a) {
    if (schedule.size() < 3) throw ParameterError("convergence probe needs at least three spacings");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        require_positive(schedule[i], "spacing");
        if (i && !(schedule[i] < schedule[i - 1]))
            throw ParameterError("spacing schedule must be strictly decreasing");
    }
    require_positive(k, "K");
    ConvergenceProbe out;
    std::vector<double> xs, ys;
    for (double d : schedule) {
        // Smallest whole number of cells whose range covers R = K / delta.
        const int p = static_cast<int>(std::ceil(k / (d * d) - 1e-9));
        out.points.push_back(mse_bound(lambda, eta, a, d, p, p));
        const double b = out.points.back().bound();
        if (!(b > 0.0)) throw NumericalError("bound is not positive on the schedule");
        xs.push_back(std::log(d));
        ys.push_back(std::log(b));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.slope = sxy / sxx;
    return out;
}

}  // namespace vmma
