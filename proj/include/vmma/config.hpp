#pragma once

#include <istream>
#include <string>
#include <vector>

namespace vmma {

// Key-value config text:
//
//   # comment
//   [model]
//   lambda = 4
//   levy = { kind = "ig", a = 1.0, b = 2.0 }
//
// Inline tables expand to dotted keys (levy.kind, levy.a, ...). Quotes around
// values are stripped. Each entry remembers its section.
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
};
using ConfigEntries = std::vector<ConfigEntry>;

ConfigEntries parse_config(std::istream& in);
ConfigEntries read_config(const std::string& path);

}  // namespace vmma
