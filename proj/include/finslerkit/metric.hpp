#ifndef FINSLERKIT_METRIC_HPP
#define FINSLERKIT_METRIC_HPP

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "finslerkit/jet.hpp"

namespace finslerkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Variable slots of a jet in (r, u, v).
enum PhiVar : int { kR = 0, kU = 1, kV = 2 };

/// r = |x|, u = |y|, v = <x, y>.
struct SphericalInvariants {
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Throws DomainError when y = 0 or the vectors differ in length. |v| is
/// clamped to r*u so the Cauchy-Schwarz bound holds exactly.
SphericalInvariants invariants_of(std::span<const double> x,
                                  std::span<const double> y);

struct MetricInfo {
  std::string name;
  /// Supremum of admissible |x|.
  double domain_radius = kUnbounded;
  std::map<std::string, double> params;
  /// Known constant flag curvature. Metadata only: never read by the
  /// numerical checks.
  std::optional<double> expected_curvature;
};

/// phi evaluated on jets; closed-form metrics are written this way so they
/// can be evaluated in any set of variables.
using PhiFunction = std::function<Jet(const Jet& r, const Jet& u, const Jet& v)>;
/// phi as a jet in the three variables (r, u, v) at a point.
using PhiJetFunction = std::function<Jet(double r, double u, double v, int order)>;

/// F(x, y) = phi(|x|, |y|, <x, y>), valid in every dimension.
class SphericalMetric {
 public:
  SphericalMetric(MetricInfo info, PhiFunction phi);
  SphericalMetric(MetricInfo info, PhiJetFunction phi_jet);

  /// phi given as an expression in the variables r, u, v.
  static SphericalMetric from_expression(std::string name,
                                         std::string_view phi_source,
                                         double domain_radius = kUnbounded);

  const MetricInfo& info() const noexcept { return info_; }
  const std::string& name() const noexcept { return info_.name; }
  double domain_radius() const noexcept { return info_.domain_radius; }

  /// All partials of phi up to `order` as a jet in (r, u, v). Jet domain
  /// errors are rethrown with the (r, u, v) point in the message.
  Jet phi_jet(double r, double u, double v, int order) const;
  double phi(double r, double u, double v) const;

  /// Closed form, when the metric has one (not for quadrature-built ones).
  const PhiFunction* closed_form() const noexcept;

  /// F as a jet in the 2n variables (x^1..x^n, y^1..y^n), obtained from the
  /// (r, u, v) jet by the exact chain rule. Requires x != 0 and y != 0.
  Jet xy_jet(std::span<const double> x, std::span<const double> y,
             int order) const;

 private:
  MetricInfo info_;
  std::optional<PhiFunction> closed_form_;
  PhiJetFunction phi_jet_;
};

using XYFunction =
    std::function<Jet(std::span<const Jet> x, std::span<const Jet> y)>;

/// F(x, y) in a fixed dimension n, with no symmetry assumed.
class GeneralMetric {
 public:
  GeneralMetric(MetricInfo info, int dimension, XYFunction F);

  /// F given as an expression in x1..xn, y1..yn.
  static GeneralMetric from_expression(std::string name, std::string_view source,
                                       int dimension,
                                       double domain_radius = kUnbounded);

  const MetricInfo& info() const noexcept { return info_; }
  int dimension() const noexcept { return n_; }

  Jet xy_jet(std::span<const double> x, std::span<const double> y,
             int order) const;

 private:
  MetricInfo info_;
  int n_;
  XYFunction F_;
};

/// Evaluates a closed-form spherical metric directly on 2n-variable jets
/// (no chain rule through (r, u, v)). Used to cross-check the two
/// differentiation paths. Throws std::invalid_argument without a closed form.
GeneralMetric as_general(const SphericalMetric& metric, int dimension);

/// Either representation, with the operations common to both.
class Metric {
 public:
  Metric(SphericalMetric metric) : impl_(std::move(metric)) {}  // NOLINT
  Metric(GeneralMetric metric) : impl_(std::move(metric)) {}    // NOLINT

  const MetricInfo& info() const noexcept;
  const std::string& name() const noexcept { return info().name; }
  double domain_radius() const noexcept { return info().domain_radius; }

  const SphericalMetric* spherical() const noexcept {
    return std::get_if<SphericalMetric>(&impl_);
  }
  const GeneralMetric* general() const noexcept {
    return std::get_if<GeneralMetric>(&impl_);
  }
  /// Fixed dimension of a general metric, 0 for spherical ones.
  int dimension() const noexcept;

  Jet xy_jet(std::span<const double> x, std::span<const double> y,
             int order) const;

 private:
  std::variant<SphericalMetric, GeneralMetric> impl_;
};

/// F(x, y). Throws DomainError for y = 0, |x| >= domain_radius, or a
/// non-positive value (invalid metric/domain pair).
double evaluate_F(const Metric& metric, std::span<const double> x,
                  std::span<const double> y);

/// g_ij from the closed form in phi and its first and second partials.
Matrix fundamental_tensor(const SphericalMetric& metric,
                          std::span<const double> x, std::span<const double> y);

/// g_ij = 1/2 d^2(F^2)/dy^i dy^j by automatic differentiation.
Matrix fundamental_tensor_ad(const Metric& metric, std::span<const double> x,
                             std::span<const double> y);

/// det(g) = (phi/u)^(n+1) phi_u^(n-2) [phi_u + (r^2 u^2 - v^2) phi_vv / u].
double det_g_closed_form(const SphericalMetric& metric,
                         std::span<const double> x, std::span<const double> y);

struct ConvexityReport {
  /// phi_u > 0 and phi_vv >= -1e-12 (sufficient condition).
  bool lemma_ok = false;
  /// g positive definite by Cholesky factorization.
  bool direct_pd = false;
};

inline constexpr double kLemmaSlack = 1e-12;

ConvexityReport convexity_report(const SphericalMetric& metric,
                                 std::span<const double> x,
                                 std::span<const double> y);

/// Largest relative violation of the degree-one Euler relations
/// u phi_u + v phi_v = phi, u phi_uu + v phi_uv = 0, u phi_uv + v phi_vv = 0
/// and phi_uu = (v/u)^2 phi_vv.
double homogeneity_residual(const SphericalMetric& metric, double r, double u,
                            double v);

/// max over lambda in {0.5, 2, 3.7} of |F(x, lambda y) - lambda F(x, y)| / (lambda F).
double homogeneity_residual_xy(const Metric& metric, std::span<const double> x,
                               std::span<const double> y);

/// |phi(r, u, -v) - phi(r, u, v)| / phi(r, u, v).
double reversibility_residual(const SphericalMetric& metric, double r, double u,
                              double v);

struct RiemannianProbe {
  /// Largest entrywise difference of g between any two directions, relative
  /// to the largest |g_ij|.
  double g_spread = 0.0;
  /// Largest |C_ijk| |y| relative to the largest |g_ij|, over the directions.
  double max_cartan = 0.0;
};

RiemannianProbe riemannian_probe(const Metric& metric, std::span<const double> x,
                                 const std::vector<std::vector<double>>& ys);

}  // namespace finslerkit

#endif  // FINSLERKIT_METRIC_HPP
