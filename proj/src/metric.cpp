#include "finslerkit/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "finslerkit/errors.hpp"
#include "finslerkit/expr.hpp"
#include "finslerkit/residual.hpp"

namespace finslerkit {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("x and y must be nonempty and of equal length");
  }
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double t : a) s += t * t;
  return std::sqrt(s);
}

/// Jets for x^1..x^n, y^1..y^n as the 2n independent variables.
void lift_xy(std::span<const double> x, std::span<const double> y, int order,
             std::vector<Jet>& xs, std::vector<Jet>& ys) {
  const int n = static_cast<int>(x.size());
  xs.clear();
  ys.clear();
  for (int i = 0; i < n; ++i) xs.push_back(Jet::variable(i, x[i], 2 * n, order));
  for (int i = 0; i < n; ++i) ys.push_back(Jet::variable(n + i, y[i], 2 * n, order));
}

Jet dot(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  Jet s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SphericalInvariants invariants_of(std::span<const double> x,
                                  std::span<const double> y) {
  require_same_length(x, y);
  SphericalInvariants inv;
  inv.r = norm(x);
  inv.u = norm(y);
  if (!(inv.u > 0.0)) throw DomainError("invariants_of: y must be nonzero", inv.u);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += x[i] * y[i];
  const double bound = inv.r * inv.u;
  inv.v = std::clamp(v, -bound, bound);
  return inv;
}

SphericalMetric::SphericalMetric(MetricInfo info, PhiFunction phi)
    : info_(std::move(info)), closed_form_(std::move(phi)) {
  phi_jet_ = [f = *closed_form_](double r, double u, double v, int order) {
    return f(Jet::variable(kR, r, 3, order), Jet::variable(kU, u, 3, order),
             Jet::variable(kV, v, 3, order));
  };
}

SphericalMetric::SphericalMetric(MetricInfo info, PhiJetFunction phi_jet)
    : info_(std::move(info)), phi_jet_(std::move(phi_jet)) {}

SphericalMetric SphericalMetric::from_expression(std::string name,
                                                 std::string_view phi_source,
                                                 double domain_radius) {
  Expr e = Expr::parse(phi_source, {"r", "u", "v"});
  MetricInfo info;
  info.name = std::move(name);
  info.domain_radius = domain_radius;
  return SphericalMetric(std::move(info),
                         PhiFunction([e](const Jet& r, const Jet& u, const Jet& v) {
                           const Jet args[] = {r, u, v};
                           return e.eval(args);
                         }));
}

Jet SphericalMetric::phi_jet(double r, double u, double v, int order) const {
  try {
    return phi_jet_(r, u, v, order);
  } catch (const DomainError& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << info_.name << ": " << e.what() << " at (r, u, v) = (" << r << ", "
        << u << ", " << v << ")";
    throw DomainError(msg.str(), e.offending_value());
  }
}

double SphericalMetric::phi(double r, double u, double v) const {
  return phi_jet(r, u, v, 0).value();
}

const PhiFunction* SphericalMetric::closed_form() const noexcept {
  return closed_form_ ? &*closed_form_ : nullptr;
}

Jet SphericalMetric::xy_jet(std::span<const double> x, std::span<const double> y,
                            int order) const {
  require_same_length(x, y);
  const SphericalInvariants inv = invariants_of(x, y);
  if (!(inv.r > 0.0)) {
    throw DomainError(info_.name + ": chain rule through r = |x| needs x != 0",
                      inv.r);
  }
  std::vector<Jet> xs, ys;
  lift_xy(x, y, order, xs, ys);
  const Jet r = sqrt(dot(xs, xs));
  const Jet u = sqrt(dot(ys, ys));
  const Jet v = dot(xs, ys);
  const Jet outer = phi_jet(r.value(), u.value(), v.value(), order);
  const Jet inner[] = {r, u, v};
  return compose(outer, inner);
}

GeneralMetric::GeneralMetric(MetricInfo info, int dimension, XYFunction F)
    : info_(std::move(info)), n_(dimension), F_(std::move(F)) {
  if (n_ < 1) throw std::invalid_argument("general metric: dimension must be >= 1");
}

GeneralMetric GeneralMetric::from_expression(std::string name,
                                             std::string_view source,
                                             int dimension, double domain_radius) {
  std::vector<std::string> vars;
  for (int i = 1; i <= dimension; ++i) vars.push_back("x" + std::to_string(i));
  for (int i = 1; i <= dimension; ++i) vars.push_back("y" + std::to_string(i));
  Expr e = Expr::parse(source, vars);
  MetricInfo info;
  info.name = std::move(name);
  info.domain_radius = domain_radius;
  return GeneralMetric(std::move(info), dimension,
                       [e](std::span<const Jet> x, std::span<const Jet> y) {
                         std::vector<Jet> args(x.begin(), x.end());
                         args.insert(args.end(), y.begin(), y.end());
                         return e.eval(args);
                       });
}

Jet GeneralMetric::xy_jet(std::span<const double> x, std::span<const double> y,
                          int order) const {
  require_same_length(x, y);
  if (static_cast<int>(x.size()) != n_) {
    throw std::invalid_argument(info_.name + ": metric is defined for n = " +
                                std::to_string(n_));
  }
  std::vector<Jet> xs, ys;
  lift_xy(x, y, order, xs, ys);
  return F_(xs, ys);
}

GeneralMetric as_general(const SphericalMetric& metric, int dimension) {
  const PhiFunction* phi = metric.closed_form();
  if (phi == nullptr) {
    throw std::invalid_argument(metric.name() + " has no closed form");
  }
  MetricInfo info = metric.info();
  info.name += " (direct)";
  return GeneralMetric(std::move(info), dimension,
                       [f = *phi](std::span<const Jet> x, std::span<const Jet> y) {
                         std::vector<Jet> xs(x.begin(), x.end());
                         std::vector<Jet> ys(y.begin(), y.end());
                         return f(sqrt(dot(xs, xs)), sqrt(dot(ys, ys)), dot(xs, ys));
                       });
}

const MetricInfo& Metric::info() const noexcept {
  return std::visit([](const auto& m) -> const MetricInfo& { return m.info(); },
                    impl_);
}

int Metric::dimension() const noexcept {
  const GeneralMetric* g = general();
  return g ? g->dimension() : 0;
}

Jet Metric::xy_jet(std::span<const double> x, std::span<const double> y,
                   int order) const {
  return std::visit([&](const auto& m) { return m.xy_jet(x, y, order); }, impl_);
}

double evaluate_F(const Metric& metric, std::span<const double> x,
                  std::span<const double> y) {
  const SphericalInvariants inv = invariants_of(x, y);
  if (!(inv.r < metric.domain_radius())) {
    throw DomainError(metric.name() + ": |x| outside the domain", inv.r);
  }
  double F = 0.0;
  if (const SphericalMetric* s = metric.spherical()) {
    F = s->phi(inv.r, inv.u, inv.v);
  } else {
    F = metric.xy_jet(x, y, 0).value();
  }
  if (!(F > 0.0)) {
    throw DomainError(metric.name() + ": non-positive F, invalid metric/domain pair", F);
  }
  return F;
}

Matrix fundamental_tensor(const SphericalMetric& metric,
                          std::span<const double> x, std::span<const double> y) {
  const SphericalInvariants inv = invariants_of(x, y);
  const Jet p = metric.phi_jet(inv.r, inv.u, inv.v, 2);
  const double u = inv.u;
  const double phi = p.value();
  const double pu = p.d(kU);
  const double pv = p.d(kV);
  const double puu = p.d(kU, kU);
  const double puv = p.d(kU, kV);
  const double pvv = p.d(kV, kV);

  const double c_delta = phi * pu / u;
  const double c_xx = pv * pv + phi * pvv;
  const double c_yy = (pu * pu + phi * puu) / (u * u) - phi * pu / (u * u * u);
  const double c_xy = (pu * pv + phi * puv) / u;

  const int n = static_cast<int>(x.size());
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = (i == j ? c_delta : 0.0) + c_xx * x[i] * x[j] +
                c_yy * y[i] * y[j] + c_xy * (x[i] * y[j] + x[j] * y[i]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Matrix fundamental_tensor_ad(const Metric& metric, std::span<const double> x,
                             std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 2);
  const Jet F2 = F * F;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 0.5 * F2.d(n + i, n + j);
  return g;
}

double det_g_closed_form(const SphericalMetric& metric,
                         std::span<const double> x, std::span<const double> y) {
  const SphericalInvariants inv = invariants_of(x, y);
  const Jet p = metric.phi_jet(inv.r, inv.u, inv.v, 2);
  const int n = static_cast<int>(x.size());
  const double u = inv.u;
  const double pu = p.d(kU);
  const double gram = inv.r * inv.r * u * u - inv.v * inv.v;
  return std::pow(p.value() / u, n + 1) * std::pow(pu, n - 2) *
         (pu + gram * p.d(kV, kV) / u);
}

ConvexityReport convexity_report(const SphericalMetric& metric,
                                 std::span<const double> x,
                                 std::span<const double> y) {
  const SphericalInvariants inv = invariants_of(x, y);
  const Jet p = metric.phi_jet(inv.r, inv.u, inv.v, 2);
  ConvexityReport report;
  report.lemma_ok = p.d(kU) > 0.0 && p.d(kV, kV) >= -kLemmaSlack;
  const Matrix g = fundamental_tensor(metric, x, y);
  if (g.allFinite()) {
    Eigen::LLT<Matrix> llt(g);
    report.direct_pd = llt.info() == Eigen::Success;
  }
  return report;
}

double homogeneity_residual(const SphericalMetric& metric, double r, double u,
                            double v) {
  const Jet p = metric.phi_jet(r, u, v, 2);
  const double phi = p.value();
  const double pu = p.d(kU);
  const double pv = p.d(kV);
  const double puu = p.d(kU, kU);
  const double puv = p.d(kU, kV);
  const double pvv = p.d(kV, kV);

  const double first = std::abs(u * pu + v * pv - phi) / std::abs(phi);
  // Second derivatives of a 1-homogeneous phi scale like phi/u; that scale
  // is added to the denominators so cancellation noise in near-zero terms
  // does not read as an O(1) relative error.
  const double natural = std::abs(phi) / u;
  auto rel = [&](Residual res, double floor) {
    return std::abs(res.raw) / (res.scale + floor);
  };
  const double e1 = rel(residual_of({u * puu, v * puv}), natural);
  const double e2 = rel(residual_of({u * puv, v * pvv}), natural);
  const double e3 = rel(residual_of({puu, -(v / u) * (v / u) * pvv}), natural / u);
  return std::max({first, e1, e2, e3});
}

double homogeneity_residual_xy(const Metric& metric, std::span<const double> x,
                               std::span<const double> y) {
  const double F = evaluate_F(metric, x, y);
  double worst = 0.0;
  std::vector<double> scaled(y.begin(), y.end());
  for (double lambda : {0.5, 2.0, 3.7}) {
    for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = lambda * y[i];
    const double Fl = evaluate_F(metric, x, scaled);
    worst = std::max(worst, std::abs(Fl - lambda * F) / (lambda * F));
  }
  return worst;
}

double reversibility_residual(const SphericalMetric& metric, double r, double u,
                              double v) {
  const double forward = metric.phi(r, u, v);
  const double backward = metric.phi(r, u, -v);
  return std::abs(backward - forward) / std::abs(forward);
}

}  // namespace finslerkit
