#include "finslerkit/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "finslerkit/errors.hpp"
#include "finslerkit/residual.hpp"

namespace finslerkit {

namespace {

double finite_or_inf(double x) {
  return std::isfinite(x) ? x : std::numeric_limits<double>::infinity();
}

/// P as an order-1 jet in (r, u, v): requires phi to order 2.
Jet projective_factor_jet(const SphericalMetric& metric, double r, double u,
                          double v) {
  const Jet phi2 = metric.phi_jet(r, u, v, 2);
  const Jet phi = phi2.truncated(1);
  const Jet rj = Jet::variable(kR, r, 3, 1);
  const Jet uj = Jet::variable(kU, u, 3, 1);
  const Jet vj = Jet::variable(kV, v, 3, 1);
  const Jet Q = vj / rj * phi2.partial(kR) + uj * uj * phi2.partial(kV);
  return Q / (2.0 * phi);
}

/// P(x, y) as an order-1 jet in the 2n variables; F is needed to order 2.
Jet projective_factor_xy_jet(const Metric& metric, std::span<const double> x,
                             std::span<const double> y, Jet* F_out) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 2);
  Jet contraction(2 * n, 1);
  for (int k = 0; k < n; ++k) {
    contraction += F.partial(k) * Jet::variable(n + k, y[k], 2 * n, 1);
  }
  if (F_out) *F_out = F;
  return contraction / (2.0 * F.truncated(1));
}

}  // namespace

Vector rapcsak_residual(const Metric& metric, std::span<const double> x,
                        std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 2);
  Vector out(n);
  double scale = 0.0;
  for (int l = 0; l < n; ++l) {
    Residual res;
    for (int k = 0; k < n; ++k) res.add(F.d(k, n + l) * y[k]);
    res.add(-F.d(l));
    out(l) = std::abs(res.raw);
    scale = std::max(scale, res.scale);
  }
  if (scale > 0.0) out /= scale;
  return out;
}

PdeResiduals projective_pde_residuals(const SphericalMetric& metric, double r,
                                      double u, double v) {
  const Jet p = metric.phi_jet(r, u, v, 2);
  PdeResiduals out;
  out.first = relative_residual(
      {p.d(kR, kV) * v / r, p.d(kV, kV) * u * u, -p.d(kR) / r});
  out.second = relative_residual({p.d(kU, kV) * u, p.d(kR, kU) * v / (r * u)});
  return out;
}

double projective_factor(const SphericalMetric& metric, double r, double u,
                         double v) {
  const Jet p = metric.phi_jet(r, u, v, 1);
  return (v / r * p.d(kR) + u * u * p.d(kV)) / (2.0 * p.value());
}

double projective_factor_xy(const Metric& metric, std::span<const double> x,
                            std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 1);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += F.d(k) * y[k];
  return s / (2.0 * F.value());
}

PdeResiduals curvature_pde_residuals(const SphericalMetric& metric, double r,
                                     double u, double v, double lambda) {
  const Jet p = metric.phi_jet(r, u, v, 2);
  const double phi = p.value();
  const double pr = p.d(kR);
  const double pu = p.d(kU);
  const double pv = p.d(kV);
  const double Q = v / r * pr + u * u * pv;
  // dQ/dr at fixed (u, v)
  const double Qr = -v / (r * r) * pr + v / r * p.d(kR, kR) + u * u * p.d(kR, kV);
  const double phi2 = phi * phi;
  const double phi4 = phi2 * phi2;

  PdeResiduals out;
  out.first = relative_residual({4.0 * lambda * r * phi4 * pu, r * pu * Q * Q,
                                 -4.0 * r * u * phi * pv * Q, 4.0 * u * phi2 * pr});
  out.second = relative_residual({4.0 * lambda * r * phi4 * pv, r * pv * Q * Q,
                                  2.0 * phi2 * Qr, -4.0 * phi * pr * Q});
  return out;
}

double flag_curvature(const SphericalMetric& metric, double r, double u,
                      double v) {
  const Jet P = projective_factor_jet(metric, r, u, v);
  const double phi = metric.phi(r, u, v);
  const double P_xk_yk = P.d(kR) * v / r + P.d(kV) * u * u;
  return (P.value() * P.value() - P_xk_yk) / (phi * phi);
}

double flag_curvature_xy(const Metric& metric, std::span<const double> x,
                         std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  Jet F;
  const Jet P = projective_factor_xy_jet(metric, x, y, &F);
  double P_xk_yk = 0.0;
  for (int k = 0; k < n; ++k) P_xk_yk += P.d(k) * y[k];
  return (P.value() * P.value() - P_xk_yk) / (F.value() * F.value());
}

Vector projective_curvature_residual(const Metric& metric,
                                     std::span<const double> x,
                                     std::span<const double> y, double lambda) {
  const int n = static_cast<int>(x.size());
  Jet F;
  const Jet P = projective_factor_xy_jet(metric, x, y, &F);
  Vector out(n);
  double scale = 0.0;
  for (int k = 0; k < n; ++k) {
    const Residual res = residual_of(
        {P.d(k), -P.value() * P.d(n + k), lambda * F.value() * F.d(n + k)});
    out(k) = std::abs(res.raw);
    scale = std::max(scale, res.scale);
  }
  if (scale > 0.0) out /= scale;
  return out;
}

std::string CurvatureVerdict::describe() const {
  switch (status) {
    case Status::not_projective: return "not projective";
    case Status::non_constant: return "projective, non-constant curvature";
    case Status::constant: return "constant flag curvature";
  }
  return "?";
}

CurvatureVerdict constant_curvature_verdict(
    const SphericalMetric& metric, const std::vector<SamplePoint>& samples,
    std::optional<double> lambda_hypothesis,
    const CurvatureTolerances& tolerances) {
  if (samples.empty()) {
    throw std::invalid_argument("constant_curvature_verdict: no samples");
  }
  CurvatureVerdict verdict;
  verdict.samples_used = samples.size();
  const Metric as_metric(metric);

  for (const SamplePoint& s : samples) {
    const double worst = finite_or_inf(rapcsak_residual(as_metric, s.x, s.y).maxCoeff());
    verdict.projectivity_residual = std::max(verdict.projectivity_residual, worst);
  }
  if (verdict.projectivity_residual > tolerances.projectivity_gate) {
    verdict.status = CurvatureVerdict::Status::not_projective;
    verdict.pass = false;
    return verdict;
  }

  std::vector<double> lambdas;
  std::vector<SphericalInvariants> points;
  lambdas.reserve(samples.size());
  for (const SamplePoint& s : samples) {
    points.push_back(invariants_of(s.x, s.y));
    const auto& p = points.back();
    lambdas.push_back(finite_or_inf(flag_curvature(metric, p.r, p.u, p.v)));
  }
  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  verdict.lambda_estimate = sorted.size() % 2 == 1
                                ? sorted[mid]
                                : 0.5 * (sorted[mid - 1] + sorted[mid]);
  for (double l : lambdas) {
    verdict.max_deviation =
        std::max(verdict.max_deviation, finite_or_inf(std::abs(l - verdict.lambda_estimate)));
  }

  verdict.lambda_used = lambda_hypothesis.value_or(verdict.lambda_estimate);
  double worst_pde = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    PdeResiduals res = curvature_pde_residuals(metric, p.r, p.u, p.v, verdict.lambda_used);
    res.first = finite_or_inf(res.first);
    res.second = finite_or_inf(res.second);
    verdict.curvature_pde_residual.first = std::max(verdict.curvature_pde_residual.first, res.first);
    verdict.curvature_pde_residual.second = std::max(verdict.curvature_pde_residual.second, res.second);
    if (res.max() > worst_pde) {
      worst_pde = res.max();
      verdict.worst_sample = i;
    }
  }

  const bool constant = verdict.max_deviation <= tolerances.deviation;
  verdict.status = constant ? CurvatureVerdict::Status::constant
                            : CurvatureVerdict::Status::non_constant;
  bool agrees = true;
  if (lambda_hypothesis) {
    agrees = std::abs(verdict.lambda_estimate - *lambda_hypothesis) <= tolerances.deviation;
  }
  verdict.pass = constant && agrees && verdict.curvature_pde_residual.max() <= tolerances.pde;
  return verdict;
}

}  // namespace finslerkit
