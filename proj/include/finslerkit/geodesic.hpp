#ifndef FINSLERKIT_GEODESIC_HPP
#define FINSLERKIT_GEODESIC_HPP

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "finslerkit/metric.hpp"

namespace finslerkit {

/// Spray coefficients G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}).
/// Throws ConvexityError when g is not positive definite at (x, y).
Vector spray_general(const Metric& metric, std::span<const double> x,
                     std::span<const double> y);

/// |G - P y| / (|G| + |P y|) with P = F_{x^k} y^k / (2F); zero exactly when
/// the spray is projectively flat at the sample.
double spray_projectivity_residual(const Metric& metric, std::span<const double> x,
                                   std::span<const double> y);

struct GeodesicPath {
  std::vector<double> times;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> velocities;
  /// Set when integration stopped because the path left the domain (or the
  /// metric could not be evaluated); the path then ends at the last good
  /// sample.
  std::optional<double> exit_time;
};

/// Largest admissible horizon for a ball metric: the Euclidean chord
/// x0 + t y0 stays within 0.95 * domain_radius. Unbounded metrics return
/// `horizon` unchanged.
double shrink_horizon(const Metric& metric, std::span<const double> x0,
                      std::span<const double> y0, double horizon);

/// Classical fixed-step RK4 on x'' = -2 G(x, x'), steps + 1 samples on
/// [0, horizon] unless the path exits early.
GeodesicPath integrate_geodesic(const Metric& metric, std::span<const double> x0,
                                std::span<const double> y0, double horizon,
                                int steps);

/// Max distance of the path points from the line {x0 + s y0}, divided by the
/// polyline arc length of the path.
double straightness_deviation(const GeodesicPath& path, std::span<const double> x0,
                              std::span<const double> y0);

/// CSV with header t,x1..xn,y1..yn and 17 significant digits.
void write_geodesic_csv(std::ostream& out, const GeodesicPath& path);

}  // namespace finslerkit

#endif  // FINSLERKIT_GEODESIC_HPP
