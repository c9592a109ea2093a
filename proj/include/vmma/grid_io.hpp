#pragma once

#include <iosfwd>
#include <string>

#include "vmma/grid.hpp"

namespace vmma {

// 17 significant digits; reads back to the same double.
std::string format_double(double v);

// Grid CSV: optional header line "# origin=<x1>,<x2> spacing=<d>", then one
// line per grid row. Missing cells are written as NaN; empty cells read as missing.
void write_field_csv(std::ostream& out, const Field& f);
void write_field_csv(const std::string& path, const Field& f);
Field read_field_csv(std::istream& in);
Field read_field_csv(const std::string& path);

}  // namespace vmma
