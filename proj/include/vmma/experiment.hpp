#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmma/inference.hpp"
#include "vmma/simulator.hpp"

namespace vmma {

struct ExperimentConfig {
    ModelParams model{};
    int replicates = 20;
    // Replicate r (1-based) uses seed seed_base + r - 1.
    std::uint64_t seed_base = 1;
    TwoStepConfig estimation{};
    bool coupled_gma = false;
    int threads = 1;
};

struct ReplicateResult {
    int index;
    std::uint64_t seed;
    EstimationReport vmma;
    std::optional<EstimationReport> gma;
};

// Runs fn(0..n-1) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::vector<ReplicateResult> run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
    std::string parameter;
    std::size_t n;
    double median, q1, q3;
    std::size_t gma_n = 0;
    double gma_median = 0.0, gma_q1 = 0.0, gma_q3 = 0.0;
};

// Medians and quartiles of each estimate over the successful replicates.
std::vector<SummaryRow> summarize(const std::vector<ReplicateResult>& results, bool with_gma);

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows, bool with_gma);
// One line per replicate with every estimate.
void write_replicates_csv(const std::string& path, const std::vector<ReplicateResult>& results);

// Peak MRV value, the curve value at the selected q.
std::optional<double> mrv_peak(const EstimationReport& r);

}  // namespace vmma
