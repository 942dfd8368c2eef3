#ifndef FINSLERKIT_PROJECTIVE_HPP
#define FINSLERKIT_PROJECTIVE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finslerkit/metric.hpp"
#include "finslerkit/symmetry.hpp"

namespace finslerkit {

/// Pair of relative residuals of a two-equation system.
struct PdeResiduals {
  double first = 0.0;
  double second = 0.0;

  double max() const { return first > second ? first : second; }
};

/// Rapcsak residual F_{x^k y^l} y^k - F_{x^l} for each l, divided by the
/// largest per-component sum of absolute term magnitudes.
Vector rapcsak_residual(const Metric& metric, std::span<const double> x,
                        std::span<const double> y);

/// Relative residuals of
///   phi_rv v/r + phi_vv u^2 - phi_r/r = 0   and
///   phi_uv u + phi_ru v/(r u) = 0.
PdeResiduals projective_pde_residuals(const SphericalMetric& metric, double r,
                                      double u, double v);

/// P = (v/r phi_r + u^2 phi_v) / (2 phi).
double projective_factor(const SphericalMetric& metric, double r, double u,
                         double v);

/// P = F_{x^k} y^k / (2F), for any metric.
double projective_factor_xy(const Metric& metric, std::span<const double> x,
                            std::span<const double> y);

/// Relative residuals of the two constant-curvature equations in phi with
/// Q = v/r phi_r + u^2 phi_v:
///   4 lambda r phi^4 phi_u + r phi_u Q^2 - 4 r u phi phi_v Q + 4 u phi^2 phi_r
///   4 lambda r phi^4 phi_v + r phi_v Q^2 + 2 phi^2 Q_r - 4 phi phi_r Q
PdeResiduals curvature_pde_residuals(const SphericalMetric& metric, double r,
                                     double u, double v, double lambda);

/// Pointwise flag curvature of a projective metric,
/// lambda = (P^2 - P_{x^k} y^k) / F^2 with P_{x^k} y^k = P_r v/r + P_v u^2.
double flag_curvature(const SphericalMetric& metric, double r, double u,
                      double v);

/// Same quantity from 2n-variable jets of F, for any metric.
double flag_curvature_xy(const Metric& metric, std::span<const double> x,
                         std::span<const double> y);

/// Componentwise residual of P_{x^k} = P P_{y^k} - lambda F F_{y^k},
/// relative to the largest per-component term sum.
Vector projective_curvature_residual(const Metric& metric,
                                     std::span<const double> x,
                                     std::span<const double> y, double lambda);

struct CurvatureTolerances {
  double deviation = 1e-6;
  double pde = 1e-8;
  /// Rapcsak residual above which the metric is treated as not projective.
  double projectivity_gate = 1e-6;
};

struct CurvatureVerdict {
  enum class Status { constant, non_constant, not_projective };

  Status status = Status::not_projective;
  bool pass = false;
  /// Median of the pointwise flag curvature.
  double lambda_estimate = 0.0;
  double max_deviation = 0.0;
  /// Worst curvature-equation residuals at the hypothesis (or the estimate).
  PdeResiduals curvature_pde_residual;
  double lambda_used = 0.0;
  std::size_t samples_used = 0;
  /// Sample with the largest curvature-equation residual.
  std::size_t worst_sample = 0;
  /// Largest Rapcsak residual seen by the projectivity gate.
  double projectivity_residual = 0.0;

  std::string describe() const;
};

/// Curvature verdict over samples. When `lambda_hypothesis` is given the
/// curvature equations are evaluated there and the estimate must agree with
/// it; otherwise the estimate itself is used. Refuses to estimate (status
/// not_projective) when the Rapcsak residual exceeds the gate.
CurvatureVerdict constant_curvature_verdict(
    const SphericalMetric& metric, const std::vector<SamplePoint>& samples,
    std::optional<double> lambda_hypothesis = std::nullopt,
    const CurvatureTolerances& tolerances = {});

}  // namespace finslerkit

#endif  // FINSLERKIT_PROJECTIVE_HPP
