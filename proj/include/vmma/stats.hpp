#pragma once

#include <vector>

namespace vmma {

// Linear-interpolation quantile (type 7), p in [0, 1]. Empty input throws.
double quantile(std::vector<double> xs, double p);
double median(std::vector<double> xs);
double iqr(const std::vector<double>& xs);

}  // namespace vmma
