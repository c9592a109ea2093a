#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vmma/error.hpp"
#include "vmma/experiment.hpp"
#include "vmma/grid_io.hpp"
#include "vmma/moments.hpp"
#include "vmma/report.hpp"

namespace vmma::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

Field with_spacing(const Field& f, double spacing) {
    const Grid g(f.grid().origin(), spacing, f.rows(), f.cols());
    return Field(g, f.values(), f.mask());
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParameterError("bad number '" + item + "' in list");
        }
    }
    if (out.empty()) throw ParameterError("empty list");
    return out;
}

}  // namespace

ModelParams ModelOptions::params() const {
    ModelParams m;
    m.lambda = lambda;
    m.eta = eta;
    m.levy = ig_from_moments(a, b);
    m.delta = delta;
    m.n = n;
    m.p = p;
    m.ptilde = ptilde;
    m.validate();
    return m;
}

TwoStepConfig EstimationOptions::config() const {
    TwoStepConfig c;
    c.q_min = q_min;
    c.q_max = q_max;
    c.fit = parse_fit_method(fit);
    c.fixed_q = fix_q;
    if (fix_q) Window w(*fix_q);
    Window lo(q_min), hi(q_max);
    if (q_min > q_max) throw ParameterError("q-min exceeds q-max");
    return c;
}

void add_model_options(CLI::App* app, ModelOptions& m) {
    app->add_option("--lambda", m.lambda, "Field kernel rate")->capture_default_str();
    app->add_option("--eta", m.eta, "Volatility kernel rate")->capture_default_str();
    app->add_option("--a", m.a, "Mean of the IG seed per unit area")->capture_default_str();
    app->add_option("--b", m.b, "Variance of the IG seed per unit area")->capture_default_str();
    app->add_option("--delta", m.delta, "Grid spacing")->capture_default_str();
    app->add_option("--n", m.n, "Output grid side")->capture_default_str();
    app->add_option("--p", m.p, "Field kernel truncation in cells")->capture_default_str();
    app->add_option("--ptilde", m.ptilde, "Volatility kernel truncation in cells")->capture_default_str();
}

void add_estimation_options(CLI::App* app, EstimationOptions& e) {
    app->add_option("--q-min", e.q_min, "Smallest window side searched")->capture_default_str();
    app->add_option("--q-max", e.q_max, "Largest window side searched")->capture_default_str();
    app->add_option("--fit", e.fit, "Variogram fit: first-lag or lsq:<k>")->capture_default_str();
    app->add_option("--fix-q", e.fix_q, "Use this window side instead of the MRV choice");
}

int cmd_simulate(const SimulateOptions& o, int threads) {
    const ModelParams params = o.model.params();
    if (o.replicates < 1) throw ParameterError("replicates must be at least 1");
    ensure_dir(o.out_dir);
    parallel_for(o.replicates, threads, [&](int k) {
        const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
        const auto sim = simulate_vmma(params, seed, o.with_gma);
        const std::string tag = std::to_string(seed);
        write_field_csv(join(o.out_dir, "y_" + tag + ".csv"), sim.y);
        write_field_csv(join(o.out_dir, "sigma2_" + tag + ".csv"), sim.sigma2);
        if (sim.gma) write_field_csv(join(o.out_dir, "gma_" + tag + ".csv"), *sim.gma);
        if (o.with_variance)
            write_field_csv(join(o.out_dir, "condvar_" + tag + ".csv"),
                            conditional_variance_surface(params, sim.sigma2));
    });
    return 0;
}

int cmd_estimate(const EstimateOptions& o) {
    Field f = read_field_csv(o.input);
    if (o.delta) f = with_spacing(f, *o.delta);
    const auto report = run_two_step(f, o.est.config());
    write_json(o.report, report_to_json(report));
    if (!o.local_variance.empty() && report.local_variance) write_field_csv(o.local_variance, *report.local_variance);
    if (!report.ok()) {
        std::cerr << "vmma: estimation failed at " << *report.error_stage << ": " << *report.error << '\n';
        return 3;
    }
    return 0;
}

int cmd_analyze(const AnalyzeOptions& o) {
    Field f = read_field_csv(o.input);
    if (!(o.unit_scale > 0.0)) throw ParameterError("unit scale must be positive");
    f = with_spacing(f, o.delta ? *o.delta : f.spacing() * o.unit_scale);
    AnalysisConfig cfg;
    cfg.estimation = o.est.config();
    cfg.holdout = o.holdout;
    cfg.margin = o.margin;
    cfg.seed = o.seed;
    const auto res = run_analysis(f, cfg);

    auto j = report_to_json(res.report);
    j["holdout"] = res.split.test.size();
    j["margin"] = res.margin;
    j["margin_default"] = !o.margin.has_value();
    j["polish_iterations"] = res.polish.iterations;
    j["polish_converged"] = res.polish.converged;
    j["polish_overall"] = res.polish.overall;
    if (res.coverage) {
        j["hits_vmma"] = res.coverage->hits_vmma;
        j["hits_gma"] = res.coverage->hits_gma;
        j["n_test"] = res.coverage->n;
    }
    write_json(o.report, j);
    if (!res.report.ok()) {
        std::cerr << "vmma: estimation failed at " << *res.report.error_stage << ": " << *res.report.error << '\n';
        return 3;
    }
    write_intervals_csv(o.intervals, *res.intervals, res.split.test);
    return 0;
}

int cmd_mse_bound(const MseBoundOptions& o) {
    const auto schedule = parse_list(o.schedule);
    std::ostringstream csv;
    csv << "delta,p,ptilde,t2,t4,t5,bound\n";
    std::vector<MseBoundTerms> terms;
    if (schedule.size() >= 3) {
        const auto probe = convergence_order_probe(schedule, o.k, o.lambda, o.eta, o.a);
        terms = probe.points;
        std::cerr << "slope " << format_double(probe.slope) << '\n';
    } else {
        for (double d : schedule) {
            if (!(d > 0.0)) throw ParameterError("spacings must be positive");
            const int p = static_cast<int>(std::ceil(o.k / (d * d) - 1e-9));
            terms.push_back(mse_bound(o.lambda, o.eta, o.a, d, p, p));
        }
    }
    for (const auto& t : terms)
        csv << format_double(t.delta) << ',' << t.p << ',' << t.ptilde << ',' << format_double(t.t2) << ','
            << format_double(t.t4) << ',' << format_double(t.t5) << ',' << format_double(t.bound()) << '\n';
    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(o.out, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + o.out);
        out << csv.str();
    }
    return 0;
}

int cmd_experiment(const ExperimentOptions& o, int threads) {
    ExperimentConfig cfg;
    cfg.model = o.model.params();
    cfg.replicates = o.replicates;
    cfg.seed_base = o.seed;
    cfg.estimation = o.est.config();
    cfg.coupled_gma = o.coupled_gma;
    cfg.threads = threads;
    ensure_dir(o.out_dir);
    const auto results = run_experiment(cfg);
    int failures = 0;
    for (const auto& r : results) {
        write_json(join(o.out_dir, "report_" + std::to_string(r.index) + ".json"), report_to_json(r.vmma));
        failures += !r.vmma.ok();
        if (r.gma) {
            write_json(join(o.out_dir, "report_gma_" + std::to_string(r.index) + ".json"), report_to_json(*r.gma));
            failures += !r.gma->ok();
        }
    }
    write_summary_csv(join(o.out_dir, "summary.csv"), summarize(results, o.coupled_gma), o.coupled_gma);
    write_replicates_csv(join(o.out_dir, "replicates.csv"), results);
    if (failures) {
        std::cerr << "vmma: " << failures << " estimation run(s) failed; see replicates.csv\n";
        return 3;
    }
    return 0;
}

}  // namespace vmma::cli
