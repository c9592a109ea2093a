#include "vmma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "vmma/error.hpp"
#include "vmma/grid_io.hpp"
#include "vmma/stats.hpp"

namespace vmma {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int workers = std::clamp(threads, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<ReplicateResult> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.replicates < 1) throw ParameterError("replicate count must be at least 1");
    cfg.model.validate();
    std::vector<ReplicateResult> out(static_cast<std::size_t>(cfg.replicates));
    parallel_for(cfg.replicates, cfg.threads, [&](int k) {
        const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(k);
        const auto sim = simulate_vmma(cfg.model, seed, cfg.coupled_gma);
        ReplicateResult r{k + 1, seed, run_two_step(sim.y, cfg.estimation), std::nullopt};
        if (cfg.coupled_gma) r.gma = run_two_step(*sim.gma, cfg.estimation);
        out[static_cast<std::size_t>(k)] = std::move(r);
    });
    return out;
}

std::optional<double> mrv_peak(const EstimationReport& r) {
    if (!r.mrv || !r.q) return std::nullopt;
    for (std::size_t k = 0; k < r.mrv->qs.size(); ++k)
        if (r.mrv->qs[k] == *r.q) return r.mrv->values[k];
    return std::nullopt;
}

namespace {

using Getter = std::optional<double> (*)(const EstimationReport&);

struct Param {
    const char* name;
    Getter get;
};

const Param kParams[] = {
    {"kappa2_hat", [](const EstimationReport& r) { return r.kappa2_hat; }},
    {"lambda_hat", [](const EstimationReport& r) { return r.lambda_hat; }},
    {"a_hat", [](const EstimationReport& r) { return r.a_hat; }},
    {"a2_hat", [](const EstimationReport& r) { return r.a2_hat; }},
    {"A_hat", [](const EstimationReport& r) { return r.A_hat; }},
    {"B_hat", [](const EstimationReport& r) { return r.B_hat; }},
    {"b_hat", [](const EstimationReport& r) { return r.b_hat; }},
    {"eta_hat", [](const EstimationReport& r) { return r.eta_hat; }},
    {"q", [](const EstimationReport& r) { return r.q ? std::optional<double>(*r.q) : std::nullopt; }},
    {"mrv_peak", [](const EstimationReport& r) { return mrv_peak(r); }},
};

void stats_of(const std::vector<double>& xs, std::size_t& n, double& med, double& q1, double& q3) {
    n = xs.size();
    if (xs.empty()) {
        med = q1 = q3 = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    med = quantile(xs, 0.5);
    q1 = quantile(xs, 0.25);
    q3 = quantile(xs, 0.75);
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string("NaN"); }

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ReplicateResult>& results, bool with_gma) {
    std::vector<SummaryRow> rows;
    for (const auto& p : kParams) {
        std::vector<double> v, g;
        for (const auto& r : results) {
            if (auto x = p.get(r.vmma)) v.push_back(*x);
            if (with_gma && r.gma)
                if (auto x = p.get(*r.gma)) g.push_back(*x);
        }
        SummaryRow row{p.name, 0, 0, 0, 0};
        stats_of(v, row.n, row.median, row.q1, row.q3);
        if (with_gma) stats_of(g, row.gma_n, row.gma_median, row.gma_q1, row.gma_q3);
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows, bool with_gma) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "parameter,n,median,q1,q3";
    if (with_gma) out << ",gma_n,gma_median,gma_q1,gma_q3";
    out << '\n';
    for (const auto& r : rows) {
        out << r.parameter << ',' << r.n << ',' << format_double(r.median) << ',' << format_double(r.q1) << ','
            << format_double(r.q3);
        if (with_gma)
            out << ',' << r.gma_n << ',' << format_double(r.gma_median) << ',' << format_double(r.gma_q1) << ','
                << format_double(r.gma_q3);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_replicates_csv(const std::string& path, const std::vector<ReplicateResult>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "replicate,seed,source";
    for (const auto& p : kParams) out << ',' << p.name;
    out << ",error\n";
    auto line = [&](const ReplicateResult& r, const EstimationReport& e, const char* src) {
        out << r.index << ',' << r.seed << ',' << src;
        for (const auto& p : kParams) out << ',' << cell(p.get(e));
        std::string msg = e.error ? *e.error_stage + ": " + *e.error : std::string();
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << ',' << (msg.empty() ? msg : "\"" + msg + "\"") << '\n';
    };
    for (const auto& r : results) {
        line(r, r.vmma, "vmma");
        if (r.gma) line(r, *r.gma, "gma");
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace vmma
