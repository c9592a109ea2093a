#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/inference.hpp"
#include "vmma/random.hpp"

namespace vmma {

struct MedianPolishResult {
    double overall = 0.0;
    std::vector<double> row_effects;
    std::vector<double> col_effects;
    Field trend;      // defined everywhere
    Field residuals;  // masked like the input
    int iterations = 0;
    bool converged = false;
};

// Tukey median polish over observed cells. tol <= 0 selects 1e-6 times the
// interquartile range of the data.
MedianPolishResult median_polish(const Field& f, int max_iter = 20, double tol = 0.0);

struct TestPoint {
    std::size_t row;
    std::size_t col;
    double value;
};

struct HoldoutSplit {
    Field train;
    std::vector<TestPoint> test;  // row-major order
};

// n_test observed cells at least `margin` cells from every edge, sampled without
// replacement and masked out of the training field.
HoldoutSplit holdout_split(const Field& f, std::size_t n_test, RngStream& rng, std::size_t margin);

enum class IntervalSource { Vmma, Gma };

struct PredictionInterval {
    std::size_t row;
    std::size_t col;
    double center;
    double half_width;
    double level;
    IntervalSource source;

    bool contains(double v) const { return v >= center - half_width && v <= center + half_width; }
};

struct IntervalTable {
    std::vector<PredictionInterval> vmma;
    std::vector<PredictionInterval> gma;
};

inline constexpr double kZ95 = 1.959963984540054;

// Intervals centred on the trend. The VMMA half-width uses the local variance
// at the location, the GMA one the constant a_hat * lambda_hat / (2 pi).
IntervalTable prediction_intervals(const EstimationReport& report, const MedianPolishResult& mp,
                                   std::span<const TestPoint> locations);

// Same construction from explicit trend and variance surfaces on the data grid.
IntervalTable prediction_intervals(const Field& trend, const Field& variance, double gma_variance,
                                   std::span<const TestPoint> locations);

struct Coverage {
    std::size_t hits_vmma = 0;
    std::size_t hits_gma = 0;
    std::size_t n = 0;
};

Coverage coverage_report(const IntervalTable& intervals, std::span<const double> truths);

struct AnalysisConfig {
    TwoStepConfig estimation{};
    std::size_t holdout = 100;
    // Cells kept clear of the edges when choosing test points; unset selects
    // the half-width of the largest window searched.
    std::optional<std::size_t> margin;
    std::uint64_t seed = 1;
    int polish_max_iter = 20;
};

struct AnalysisResult {
    HoldoutSplit split;
    MedianPolishResult polish;
    EstimationReport report;
    std::size_t margin = 0;
    std::optional<IntervalTable> intervals;
    std::optional<Coverage> coverage;
};

// Holdout, median polish on the training cells, two-step estimation on the
// residuals, intervals and coverage at the held-out cells.
AnalysisResult run_analysis(const Field& data, const AnalysisConfig& cfg);

}  // namespace vmma
