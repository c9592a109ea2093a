#pragma once

#include <vector>

namespace vmma {

// Closed-form moments of the Gaussian-kernel VMMA with IG volatility of mean a
// and variance b per unit area.
struct TheoreticalMoments {
    double kappa2;
    double kappa3;
    double kappa4;
    // Cov(sigma_i^2(x), sigma_i^2(x*)) = A exp(-B |x - x*|^2).
    double A;
    double B;
    // Cov(Y^2(x), Y^2(x*)) = C1 exp(-lambda d^2) + A exp(-B d^2).
    double C1;
    double lambda;
};

TheoreticalMoments theoretical_moments(double lambda, double eta, double a, double b);
double correlation(double lambda, double d);
double cov_y2(double lambda, double eta, double a, double b, double d);

struct MseBoundTerms {
    double t2;
    double t4;
    double t5;
    double bound() const { return t2 + t4 + t5; }

    double lambda, eta, a, delta;
    int p, ptilde;
};

// Upper bound on E|Y(x) - Z(x)|^2 between the continuous field and its
// discretisation with spacing delta and truncations p (field) and ptilde (volatility).
MseBoundTerms mse_bound(double lambda, double eta, double a, double delta, int p, int ptilde);

struct ConvergenceProbe {
    std::vector<MseBoundTerms> points;
    double slope;
};

// Bound along the schedule R = K / delta, p = ptilde = ceil(R / delta), and
// the least-squares slope of log(bound) against log(delta).
ConvergenceProbe convergence_order_probe(const std::vector<double>& schedule, double k, double lambda,
                                         double eta, double a);

// Standard normal distribution function.
double normal_cdf(double x);
// P(x < Z <= y) without cancellation in the tails.
double normal_interval(double x, double y);

}  // namespace vmma
