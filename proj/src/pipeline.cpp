#include "vmma/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vmma/error.hpp"
#include "vmma/stats.hpp"

namespace vmma {

namespace {

double median_of(std::vector<double>& xs) {
    const std::size_t n = xs.size();
    const std::size_t mid = n / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    const double hi = xs[mid];
    if (n % 2) return hi;
    const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

MedianPolishResult median_polish(const Field& f, int max_iter, double tol) {
    if (max_iter < 1) throw ParameterError("median polish needs at least one iteration");
    const std::size_t nr = f.rows(), nc = f.cols();
    for (std::size_t i = 0; i < nr; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < nc && !any; ++j) any = f.observed(i, j);
        if (!any) throw DataError("row " + std::to_string(i) + " has no observed cells");
    }
    for (std::size_t j = 0; j < nc; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < nr && !any; ++i) any = f.observed(i, j);
        if (!any) throw DataError("column " + std::to_string(j) + " has no observed cells");
    }
    if (!(tol > 0.0)) {
        std::vector<double> obs;
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                if (f.observed(i, j)) obs.push_back(f(i, j));
        const double spread = iqr(obs);
        tol = 1e-6 * (spread > 0.0 ? spread : 1.0);
    }

    MedianPolishResult r;
    r.row_effects.assign(nr, 0.0);
    r.col_effects.assign(nc, 0.0);
    Matrix z = f.values();
    std::vector<double> buf;

    for (int iter = 1; iter <= max_iter; ++iter) {
        double sweep = 0.0;
        for (std::size_t i = 0; i < nr; ++i) {
            buf.clear();
            for (std::size_t j = 0; j < nc; ++j)
                if (f.observed(i, j)) buf.push_back(z(i, j));
            const double m = median_of(buf);
            r.row_effects[i] += m;
            for (std::size_t j = 0; j < nc; ++j) z(i, j) -= m;
            sweep = std::max(sweep, std::abs(m));
        }
        buf = r.col_effects;
        double m = median_of(buf);
        for (auto& c : r.col_effects) c -= m;
        r.overall += m;

        for (std::size_t j = 0; j < nc; ++j) {
            buf.clear();
            for (std::size_t i = 0; i < nr; ++i)
                if (f.observed(i, j)) buf.push_back(z(i, j));
            const double mc = median_of(buf);
            r.col_effects[j] += mc;
            for (std::size_t i = 0; i < nr; ++i) z(i, j) -= mc;
            sweep = std::max(sweep, std::abs(mc));
        }
        buf = r.row_effects;
        m = median_of(buf);
        for (auto& v : r.row_effects) v -= m;
        r.overall += m;

        r.iterations = iter;
        if (sweep < tol) {
            r.converged = true;
            break;
        }
    }

    Matrix trend(nr, nc);
    Matrix resid(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) {
            trend(i, j) = r.overall + r.row_effects[i] + r.col_effects[j];
            resid(i, j) = f.observed(i, j) ? f(i, j) - trend(i, j) : 0.0;
        }
    r.trend = Field(f.grid(), std::move(trend));
    r.residuals = Field(f.grid(), std::move(resid), f.mask());
    return r;
}

HoldoutSplit holdout_split(const Field& f, std::size_t n_test, RngStream& rng, std::size_t margin) {
    if (2 * margin >= f.rows() || 2 * margin >= f.cols())
        throw ParameterError("holdout margin " + std::to_string(margin) + " leaves no interior cells");
    std::vector<std::size_t> candidates;
    for (std::size_t i = margin; i < f.rows() - margin; ++i)
        for (std::size_t j = margin; j < f.cols() - margin; ++j)
            if (f.observed(i, j)) candidates.push_back(i * f.cols() + j);
    if (candidates.size() < n_test)
        throw ParameterError("only " + std::to_string(candidates.size()) + " interior observed cells for " +
                             std::to_string(n_test) + " test points");
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < n_test; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(candidates.size() - k));
        std::swap(candidates[k], candidates[pick]);
    }
    std::vector<std::size_t> chosen(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::sort(chosen.begin(), chosen.end());

    HoldoutSplit s{f, {}};
    for (std::size_t idx : chosen) {
        const std::size_t i = idx / f.cols(), j = idx % f.cols();
        s.test.push_back({i, j, f(i, j)});
        s.train.set_missing(i, j);
    }
    return s;
}

IntervalTable prediction_intervals(const Field& trend, const Field& variance, double gma_variance,
                                   std::span<const TestPoint> locations) {
    if (!(gma_variance > 0.0)) throw DataError("constant comparator variance must be positive");
    // The variance field may be the smaller window-centre grid; align by origin.
    const double sp = trend.spacing();
    const double off1 = (variance.grid().origin().x1 - trend.grid().origin().x1) / sp;
    const double off2 = (variance.grid().origin().x2 - trend.grid().origin().x2) / sp;
    const auto r0 = static_cast<long>(std::lround(off1));
    const auto c0 = static_cast<long>(std::lround(off2));

    IntervalTable t;
    std::string gaps;
    const double gma_half = kZ95 * std::sqrt(gma_variance);
    for (const auto& loc : locations) {
        const long vr = static_cast<long>(loc.row) - r0, vc = static_cast<long>(loc.col) - c0;
        const bool inside = vr >= 0 && vc >= 0 && vr < static_cast<long>(variance.rows()) &&
                            vc < static_cast<long>(variance.cols()) &&
                            variance.observed(static_cast<std::size_t>(vr), static_cast<std::size_t>(vc)) &&
                            variance(static_cast<std::size_t>(vr), static_cast<std::size_t>(vc)) > 0.0;
        if (!inside) {
            gaps += " (" + std::to_string(loc.row) + "," + std::to_string(loc.col) + ")";
            continue;
        }
        const double center = trend(loc.row, loc.col);
        const double v = variance(static_cast<std::size_t>(vr), static_cast<std::size_t>(vc));
        t.vmma.push_back({loc.row, loc.col, center, kZ95 * std::sqrt(v), 0.95, IntervalSource::Vmma});
        t.gma.push_back({loc.row, loc.col, center, gma_half, 0.95, IntervalSource::Gma});
    }
    if (!gaps.empty()) throw DataError("locations outside the local-variance coverage:" + gaps);
    return t;
}

IntervalTable prediction_intervals(const EstimationReport& report, const MedianPolishResult& mp,
                                   std::span<const TestPoint> locations) {
    if (!report.local_variance || !report.a_hat || !report.lambda_hat)
        throw DataError("estimation report lacks the local variances or rate estimates");
    const double gma_var = *report.a_hat * *report.lambda_hat / (2.0 * std::numbers::pi);
    return prediction_intervals(mp.trend, *report.local_variance, gma_var, locations);
}

Coverage coverage_report(const IntervalTable& intervals, std::span<const double> truths) {
    if (intervals.vmma.size() != truths.size() || intervals.gma.size() != truths.size())
        throw ParameterError("interval and truth lists differ in length");
    Coverage c;
    c.n = truths.size();
    for (std::size_t k = 0; k < truths.size(); ++k) {
        c.hits_vmma += intervals.vmma[k].contains(truths[k]);
        c.hits_gma += intervals.gma[k].contains(truths[k]);
    }
    return c;
}

AnalysisResult run_analysis(const Field& data, const AnalysisConfig& cfg) {
    AnalysisResult out;
    out.margin = cfg.margin ? *cfg.margin : static_cast<std::size_t>(Window(cfg.estimation.fixed_q ? *cfg.estimation.fixed_q : cfg.estimation.q_max).half());
    RngStream rng(cfg.seed, Layer::Holdout);
    out.split = holdout_split(data, cfg.holdout, rng, out.margin);
    out.polish = median_polish(out.split.train, cfg.polish_max_iter);
    out.report = run_two_step(out.polish.residuals, cfg.estimation);
    if (!out.report.ok()) return out;
    out.intervals = prediction_intervals(out.report, out.polish, out.split.test);
    std::vector<double> truths;
    for (const auto& t : out.split.test) truths.push_back(t.value);
    out.coverage = coverage_report(*out.intervals, truths);
    return out;
}

}  // namespace vmma
