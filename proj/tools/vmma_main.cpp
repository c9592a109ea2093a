#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "commands.hpp"
#include "vmma/config.hpp"
#include "vmma/error.hpp"

namespace {

using namespace vmma;

// Model keys that may appear as inline tables in a config file.
const std::map<std::string, std::string> kTableKeys = {
    {"levy.a", "a"},          {"levy.b", "b"},
    {"kernel.rate", "lambda"}, {"kernel.p", "p"},
    {"volatility_kernel.rate", "eta"}, {"volatility_kernel.p", "ptilde"},
};

bool given(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

std::string config_path(const std::vector<std::string>& args) {
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
    }
    return {};
}

// Appends "--flag=value" for config keys the command line leaves unset.
void merge_config(CLI::App& app, std::vector<std::string>& args, const std::string& path) {
    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
            if (s->get_name() == a) sub = s;
        if (sub) break;
    }
    if (!sub) return;
    std::set<std::string> names;
    for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) names.insert(s->get_name());

    std::vector<std::string> extra;
    for (const auto& e : read_config(path)) {
        if (names.count(e.section) && e.section != sub->get_name()) continue;
        std::string key = e.key;
        if (key == "levy.kind") {
            if (e.value != "ig" && e.value != "inverse-gaussian")
                throw ParameterError("config: only the inverse Gaussian volatility seed is supported");
            continue;
        }
        if (key == "kernel.kind" || key == "volatility_kernel.kind") {
            if (e.value != "gaussian") throw ParameterError("config: only Gaussian kernels can be simulated");
            continue;
        }
        if (auto it = kTableKeys.find(key); it != kTableKeys.end()) key = it->second;
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        const bool known_here = sub->get_option_no_throw(flag) || app.get_option_no_throw(flag);
        if (!known_here) {
            bool known_elsewhere = false;
            for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
                known_elsewhere = known_elsewhere || s->get_option_no_throw(flag);
            if (!known_elsewhere || e.section == sub->get_name())
                throw ParameterError("config: unknown key '" + e.key + "'");
            continue;
        }
        if (given(args, flag) || given(extra, flag)) continue;
        extra.push_back(flag + "=" + e.value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Parameter: return 1;
        case ErrorKind::Data:
        case ErrorKind::Io: return 2;
        case ErrorKind::Numerical: return 3;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volatility-modulated moving average fields: simulation, moments and estimation", "vmma"};
    app.require_subcommand(1);
    int threads = 1;
    std::string config;
    app.add_option("--threads", threads, "Worker threads for replicate loops")->capture_default_str();
    app.add_option("--config", config, "Key-value config file; flags override its values");

    cli::SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Simulate VMMA fields");
    s->fallthrough();
    cli::add_model_options(s, sim.model);
    s->add_option("--seed", sim.seed, "Seed of the first replicate")->capture_default_str();
    s->add_option("--replicates", sim.replicates, "Number of replicates")->capture_default_str();
    s->add_flag("--with-gma", sim.with_gma, "Also write the coupled constant-volatility field");
    s->add_flag("--with-variance", sim.with_variance, "Also write the conditional variance surface");
    s->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();

    cli::EstimateOptions est;
    auto* e = app.add_subcommand("estimate", "Two-step moments estimation on a grid CSV");
    e->fallthrough();
    e->add_option("--input", est.input, "Grid CSV")->required();
    e->add_option("--delta", est.delta, "Grid spacing (overrides the file header)");
    cli::add_estimation_options(e, est.est);
    e->add_option("--report", est.report, "Report JSON path")->capture_default_str();
    e->add_option("--local-variance", est.local_variance, "Write the local variance field to this CSV");

    cli::AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "Detrend, hold out points, estimate and build intervals");
    a->fallthrough();
    a->add_option("--input", an.input, "Grid CSV")->required();
    a->add_option("--unit-scale", an.unit_scale, "Model units per grid-file unit")->capture_default_str();
    a->add_option("--delta", an.delta, "Grid spacing in model units (overrides header and unit scale)");
    a->add_option("--holdout", an.holdout, "Number of test points")->capture_default_str();
    a->add_option("--margin", an.margin, "Test points keep this many cells from the edges");
    a->add_option("--seed", an.seed, "Seed for the test-point draw")->capture_default_str();
    cli::add_estimation_options(a, an.est);
    a->add_option("--report", an.report, "Report JSON path")->capture_default_str();
    a->add_option("--intervals", an.intervals, "Intervals CSV path")->capture_default_str();

    cli::MseBoundOptions mb;
    auto* m = app.add_subcommand("mse-bound", "Simulation error bound along a spacing schedule");
    m->fallthrough();
    m->add_option("--lambda", mb.lambda, "Field kernel rate")->capture_default_str();
    m->add_option("--eta", mb.eta, "Volatility kernel rate")->capture_default_str();
    m->add_option("--a", mb.a, "Mean of the IG seed per unit area")->capture_default_str();
    m->add_option("--delta-schedule", mb.schedule, "Comma-separated decreasing spacings")->capture_default_str();
    m->add_option("--k", mb.k, "Truncation range is K / delta")->capture_default_str();
    m->add_option("--out", mb.out, "CSV path (default stdout)");

    cli::ExperimentOptions ex;
    auto* x = app.add_subcommand("experiment", "Replicate suite: simulate and estimate");
    x->fallthrough();
    cli::add_model_options(x, ex.model);
    cli::add_estimation_options(x, ex.est);
    x->add_option("--replicates", ex.replicates, "Number of replicates")->capture_default_str();
    x->add_option("--seed", ex.seed, "Seed of the first replicate")->capture_default_str();
    x->add_flag("--coupled-gma", ex.coupled_gma, "Estimate the coupled constant-volatility field too");
    x->add_option("--out-dir", ex.out_dir, "Output directory")->capture_default_str();

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (const auto path = config_path(args); !path.empty()) merge_config(app, args, path);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    } catch (const Error& err) {
        std::cerr << "vmma: " << err.what() << '\n';
        return exit_code(err);
    }

    try {
        if (threads < 1) throw ParameterError("--threads must be at least 1");
        if (s->parsed()) return cli::cmd_simulate(sim, threads);
        if (e->parsed()) return cli::cmd_estimate(est);
        if (a->parsed()) return cli::cmd_analyze(an);
        if (m->parsed()) return cli::cmd_mse_bound(mb);
        if (x->parsed()) return cli::cmd_experiment(ex, threads);
    } catch (const Error& err) {
        std::cerr << "vmma: " << err.what() << '\n';
        return exit_code(err);
    } catch (const std::exception& err) {
        std::cerr << "vmma: " << err.what() << '\n';
        return 1;
    }
    return 1;
}
