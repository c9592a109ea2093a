#include "vmma/stats.hpp"

#include <algorithm>
#include <cmath>

#include "vmma/error.hpp"

namespace vmma {

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw DataError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile level outside [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double iqr(const std::vector<double>& xs) { return quantile(xs, 0.75) - quantile(xs, 0.25); }

}  // namespace vmma
