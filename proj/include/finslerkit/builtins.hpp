#ifndef FINSLERKIT_BUILTINS_HPP
#define FINSLERKIT_BUILTINS_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "finslerkit/metric.hpp"

namespace finslerkit {

/// Names accepted by builtin(): euclidean, klein, funk, berwald, spherical,
/// bryant.
const std::vector<std::string>& builtin_names();

/// Classical spherically symmetric metrics. Ball metrics (klein, funk,
/// berwald) live on |x| < 1; the others on all of R^n. bryant takes the
/// parameter "alpha" in [0, pi/2) (default 0). Throws ConfigError for an
/// unknown name, an unknown parameter key, or alpha out of range.
SphericalMetric builtin(std::string_view name,
                        const std::map<std::string, double>& params = {});

/// Closest candidate by edit distance, or empty when nothing is close.
std::string closest_name(std::string_view name,
                         const std::vector<std::string>& candidates);

}  // namespace finslerkit

#endif  // FINSLERKIT_BUILTINS_HPP
