#ifndef FINSLERKIT_FAMILY_HPP
#define FINSLERKIT_FAMILY_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finslerkit/expr.hpp"
#include "finslerkit/metric.hpp"

namespace finslerkit {

struct QuadratureOptions {
  /// Accepted difference between one Gauss-Legendre panel and its two
  /// halves, per jet coefficient, relative to max(1, |coefficient|).
  double abs_tol = 1e-12;
  /// Bisection levels before declaring non-convergence.
  int max_depth = 40;
};

/// Term added to the integral: g(r) v, optionally plus h(r) |v|.
enum class Baseline { plain, abs_corrected };

/// phi(r, u, v) = int_0^u f(v^2/t^2 - r^2) dt + g(r) v [+ h(r) |v|].
struct ProjectiveFamilySpec {
  std::string name = "family";
  Expr f;
  Expr g;
  Baseline baseline = Baseline::plain;
  std::optional<Expr> h;
  QuadratureOptions quad;
  double domain_radius = kUnbounded;

  /// Parses f in t, g and h in r. `h` is required iff baseline is
  /// abs_corrected.
  static ProjectiveFamilySpec from_strings(std::string_view f, std::string_view g,
                                           Baseline baseline = Baseline::plain,
                                           std::optional<std::string_view> h = {});
};

/// Result of screening f on the log grid s = 10^-3 .. 10^6 (50 points).
struct IntegrandScreen {
  bool positive = true;
  /// f(s)/sqrt(s) decreases over the last decade of the grid, so the
  /// integrand f(v^2/t^2 - r^2) is integrable at t -> 0.
  bool decays = true;
  double first_bad_s = 0.0;
  std::string message;
};

IntegrandScreen screen_integrand(const Expr& f);

/// int_0^u f(v^2/t^2 - r^2) dt as a jet in (r, u, v). Pure (r, v)
/// derivatives come from adaptive Gauss-Legendre quadrature of the
/// jet-valued integrand; every derivative involving u is taken from
/// f(v^2/u^2 - r^2) exactly. Throws QuadratureError on non-convergence.
Jet integral_jet(const ProjectiveFamilySpec& spec, double r, double u, double v,
                 int order);

/// Family member as a SphericalMetric. Throws ConfigError when f fails the
/// screen or phi is not positive at the spot-check points.
SphericalMetric build_projective_metric(const ProjectiveFamilySpec& spec);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int points);

}  // namespace finslerkit

#endif  // FINSLERKIT_FAMILY_HPP
