#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "vmma/grid_io.hpp"
#include "vmma/inference.hpp"
#include "vmma/pipeline.hpp"

namespace vmma {

// Flat key-value estimates plus per-lag variogram and MRV tables. The local
// variance field is not embedded; write it separately as a grid CSV.
nlohmann::ordered_json report_to_json(const EstimationReport& r);
EstimationReport report_from_json(const nlohmann::ordered_json& j);

void write_json(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const std::string& path);

// row,col,center,half_vmma,half_gma,truth,hit_vmma,hit_gma
void write_intervals_csv(std::ostream& out, const IntervalTable& t, const std::vector<TestPoint>& truth);
void write_intervals_csv(const std::string& path, const IntervalTable& t, const std::vector<TestPoint>& truth);

}  // namespace vmma
