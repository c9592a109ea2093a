#include "vmma/config.hpp"

#include <fstream>

#include "vmma/error.hpp"

namespace vmma {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
        return v.substr(1, v.size() - 2);
    return v;
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') quoted = !quoted;
        if (!quoted && line[k] == '#') return line.substr(0, k);
    }
    return line;
}

}  // namespace

ConfigEntries parse_config(std::istream& in) {
    ConfigEntries out;
    std::string line;
    std::size_t no = 0;
    std::string section;
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParameterError("config line " + std::to_string(no) + ": bad section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ParameterError("config line " + std::to_string(no) + ": empty key");
        if (!value.empty() && value.front() == '{') {
            if (value.back() != '}')
                throw ParameterError("config line " + std::to_string(no) + ": unterminated inline table");
            const std::string body = value.substr(1, value.size() - 2);
            std::size_t start = 0;
            while (start <= body.size()) {
                auto comma = body.find(',', start);
                if (comma == std::string::npos) comma = body.size();
                const std::string item = trim(body.substr(start, comma - start));
                if (!item.empty()) {
                    const auto ieq = item.find('=');
                    if (ieq == std::string::npos)
                        throw ParameterError("config line " + std::to_string(no) + ": bad inline table item");
                    out.push_back({section, key + "." + trim(item.substr(0, ieq)), unquote(trim(item.substr(ieq + 1)))});
                }
                start = comma + 1;
            }
            continue;
        }
        out.push_back({section, key, unquote(value)});
    }
    return out;
}

ConfigEntries read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    return parse_config(in);
}

}  // namespace vmma
