#include "vmma/report.hpp"

#include <fstream>

#include "vmma/error.hpp"

namespace vmma {

using nlohmann::ordered_json;

namespace {

template <class T>
void put(ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v)
        j[key] = *v;
    else
        j[key] = nullptr;
}

template <class T>
std::optional<T> get(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

ordered_json variogram_json(const EmpiricalVariogram& v) {
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < v.lags.size(); ++k)
        rows.push_back({{"lag", v.lags[k]}, {"value", v.values[k]}, {"pairs", v.pairs[k]}});
    return {{"spacing", v.spacing}, {"variance", v.variance}, {"lags", rows}};
}

EmpiricalVariogram variogram_from(const ordered_json& j) {
    EmpiricalVariogram v;
    v.spacing = j.at("spacing").get<double>();
    v.variance = j.at("variance").get<double>();
    for (const auto& r : j.at("lags")) {
        v.lags.push_back(r.at("lag").get<double>());
        v.values.push_back(r.at("value").get<double>());
        v.pairs.push_back(r.at("pairs").get<std::size_t>());
    }
    return v;
}

}  // namespace

ordered_json report_to_json(const EstimationReport& r) {
    ordered_json j;
    j["fit"] = r.fit_tag;
    put(j, "kappa2_hat", r.kappa2_hat);
    put(j, "lambda_hat", r.lambda_hat);
    put(j, "a_hat", r.a_hat);
    put(j, "a2_hat", r.a2_hat);
    put(j, "A_hat", r.A_hat);
    put(j, "B_hat", r.B_hat);
    put(j, "b_hat", r.b_hat);
    put(j, "eta_hat", r.eta_hat);
    put(j, "q", r.q);
    j["q_fixed"] = r.q_fixed;
    j["peak_found"] = r.peak_found;
    put(j, "error", r.error);
    put(j, "error_stage", r.error_stage);
    j["warnings"] = r.warnings;
    if (r.mrv) {
        ordered_json rows = ordered_json::array();
        for (std::size_t k = 0; k < r.mrv->qs.size(); ++k)
            rows.push_back({{"q", r.mrv->qs[k]},
                            {"mrv", r.mrv->values[k]},
                            {"row", r.mrv->centers[k].first},
                            {"col", r.mrv->centers[k].second}});
        j["mrv"] = rows;
    } else {
        j["mrv"] = nullptr;
    }
    j["variogram_y"] = r.variogram_y ? variogram_json(*r.variogram_y) : ordered_json(nullptr);
    j["variogram_sigma"] = r.variogram_sigma ? variogram_json(*r.variogram_sigma) : ordered_json(nullptr);
    return j;
}

EstimationReport report_from_json(const ordered_json& j) {
    EstimationReport r;
    try {
        r.fit_tag = j.at("fit").get<std::string>();
        r.kappa2_hat = get<double>(j, "kappa2_hat");
        r.lambda_hat = get<double>(j, "lambda_hat");
        r.a_hat = get<double>(j, "a_hat");
        r.a2_hat = get<double>(j, "a2_hat");
        r.A_hat = get<double>(j, "A_hat");
        r.B_hat = get<double>(j, "B_hat");
        r.b_hat = get<double>(j, "b_hat");
        r.eta_hat = get<double>(j, "eta_hat");
        r.q = get<int>(j, "q");
        r.q_fixed = j.value("q_fixed", false);
        r.peak_found = j.value("peak_found", true);
        r.error = get<std::string>(j, "error");
        r.error_stage = get<std::string>(j, "error_stage");
        if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
        if (j.contains("mrv") && !j["mrv"].is_null()) {
            MrvCurve c;
            for (const auto& row : j["mrv"]) {
                c.qs.push_back(row.at("q").get<int>());
                c.values.push_back(row.at("mrv").get<double>());
                c.centers.emplace_back(row.at("row").get<std::size_t>(), row.at("col").get<std::size_t>());
            }
            r.mrv = std::move(c);
        }
        if (j.contains("variogram_y") && !j["variogram_y"].is_null()) r.variogram_y = variogram_from(j["variogram_y"]);
        if (j.contains("variogram_sigma") && !j["variogram_sigma"].is_null())
            r.variogram_sigma = variogram_from(j["variogram_sigma"]);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
    return r;
}

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ordered_json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_intervals_csv(std::ostream& out, const IntervalTable& t, const std::vector<TestPoint>& truth) {
    if (t.vmma.size() != truth.size() || t.gma.size() != truth.size())
        throw ParameterError("interval and truth lists differ in length");
    out << "row,col,center,half_vmma,half_gma,truth,hit_vmma,hit_gma\n";
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const auto& v = t.vmma[k];
        const auto& g = t.gma[k];
        out << v.row << ',' << v.col << ',' << format_double(v.center) << ',' << format_double(v.half_width)
            << ',' << format_double(g.half_width) << ',' << format_double(truth[k].value) << ','
            << (v.contains(truth[k].value) ? 1 : 0) << ',' << (g.contains(truth[k].value) ? 1 : 0) << '\n';
    }
}

void write_intervals_csv(const std::string& path, const IntervalTable& t, const std::vector<TestPoint>& truth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_intervals_csv(out, t, truth);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace vmma
