#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "vmma/pipeline.hpp"
#include "vmma/simulator.hpp"

namespace vmma::cli {

struct ModelOptions {
    double lambda = 4.0;
    double eta = 4.0;
    double a = 1.0;
    double b = 2.0;
    double delta = 0.05;
    int n = 201;
    int p = 30;
    int ptilde = 30;

    ModelParams params() const;
};

struct EstimationOptions {
    int q_min = 9;
    int q_max = 51;
    std::string fit = "first-lag";
    std::optional<int> fix_q;

    TwoStepConfig config() const;
};

struct SimulateOptions {
    ModelOptions model;
    std::uint64_t seed = 1;
    int replicates = 1;
    bool with_gma = false;
    bool with_variance = false;
    std::string out_dir = ".";
};

struct EstimateOptions {
    std::string input;
    std::optional<double> delta;
    EstimationOptions est;
    std::string report = "report.json";
    std::string local_variance;
};

struct AnalyzeOptions {
    std::string input;
    double unit_scale = 1.0;
    std::optional<double> delta;
    std::size_t holdout = 100;
    std::optional<std::size_t> margin;
    std::uint64_t seed = 1;
    EstimationOptions est;
    std::string report = "report.json";
    std::string intervals = "intervals.csv";
};

struct MseBoundOptions {
    double lambda = 4.0;
    double eta = 4.0;
    double a = 1.0;
    std::string schedule = "0.1,0.05,0.025,0.0125";
    double k = 0.075;
    std::string out;
};

struct ExperimentOptions {
    ModelOptions model;
    EstimationOptions est;
    int replicates = 20;
    std::uint64_t seed = 1;
    bool coupled_gma = false;
    std::string out_dir = ".";
};

void add_model_options(CLI::App* app, ModelOptions& m);
void add_estimation_options(CLI::App* app, EstimationOptions& e);

int cmd_simulate(const SimulateOptions& o, int threads);
int cmd_estimate(const EstimateOptions& o);
int cmd_analyze(const AnalyzeOptions& o);
int cmd_mse_bound(const MseBoundOptions& o);
int cmd_experiment(const ExperimentOptions& o, int threads);

}  // namespace vmma::cli
