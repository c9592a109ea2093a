#include "vmma/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "vmma/error.hpp"

namespace vmma {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

void parse_header(const std::string& line, Point& origin, double& spacing) {
    std::istringstream ss(line.substr(1));
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "origin") {
            const auto comma = value.find(',');
            if (comma == std::string::npos ||
                !parse_double(value.substr(0, comma), origin.x1) ||
                !parse_double(value.substr(comma + 1), origin.x2))
                throw DataError("malformed origin in grid header: " + value);
        } else if (key == "spacing") {
            if (!parse_double(value, spacing)) throw DataError("malformed spacing: " + value);
        }
    }
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& f) {
    const auto& g = f.grid();
    out << "# origin=" << format_double(g.origin().x1) << ',' << format_double(g.origin().x2)
        << " spacing=" << format_double(g.spacing()) << '\n';
    for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t j = 0; j < f.cols(); ++j) {
            if (j) out << ',';
            out << (f.observed(i, j) ? format_double(f(i, j)) : std::string("NaN"));
        }
        out << '\n';
    }
}

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_field_csv(out, f);
    if (!out) throw IoError("write failed: " + path);
}

Field read_field_csv(std::istream& in) {
    Point origin{};
    double spacing = 1.0;
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> masks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (rows.empty()) parse_header(t, origin, spacing);
            continue;
        }
        std::vector<double> vals;
        std::vector<std::uint8_t> mask;
        std::size_t start = 0;
        while (true) {
            const auto comma = t.find(',', start);
            const std::string cell =
                trim(std::string_view(t).substr(start, comma == std::string::npos ? std::string::npos
                                                                                  : comma - start));
            double v = 0.0;
            if (cell.empty() || cell == "NaN" || cell == "nan" || cell == "NA") {
                vals.push_back(0.0);
                mask.push_back(0);
            } else if (parse_double(cell, v) && std::isfinite(v)) {
                vals.push_back(v);
                mask.push_back(1);
            } else if (parse_double(cell, v) && std::isnan(v)) {
                vals.push_back(0.0);
                mask.push_back(0);
            } else {
                throw DataError("unparseable cell '" + cell + "' on line " + std::to_string(line_no));
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && vals.size() != rows.front().size())
            throw DataError("ragged grid CSV at line " + std::to_string(line_no));
        rows.push_back(std::move(vals));
        masks.push_back(std::move(mask));
    }
    if (rows.empty()) throw DataError("grid CSV contains no data rows");
    const std::size_t nr = rows.size(), nc = rows.front().size();
    Grid g(origin, spacing, nr, nc);
    Matrix m(nr, nc);
    std::vector<std::uint8_t> mask(nr * nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) {
            m(i, j) = rows[i][j];
            mask[i * nc + j] = masks[i][j];
        }
    return Field(g, std::move(m), std::move(mask));
}

Field read_field_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_field_csv(in);
}

}  // namespace vmma
