#include "finslerkit/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finslerkit/errors.hpp"

namespace finslerkit {

namespace {

constexpr int kPanelPoints = 12;

const GaussLegendreRule& panel_rule() {
  static const GaussLegendreRule rule = gauss_legendre(kPanelPoints);
  return rule;
}

/// f and its first three derivatives at a scalar argument.
struct Derivs {
  double d0, d1, d2, d3;
};

Derivs univariate(const Expr& f, double s, int order) {
  const Jet arg[] = {Jet::variable(0, s, 1, order)};
  const Jet out = f.eval(arg);
  return {out.value(), out.d(0), out.d(0, 0), out.d(0, 0, 0)};
}

Jet apply_univariate(const Expr& f, const Jet& s) {
  const Derivs h = univariate(f, s.value(), s.order());
  return compose(s, h.d0, h.d1, h.d2, h.d3);
}

/// f(v^2/t^2 - r^2) as a jet whose only live variables are r and v.
Jet integrand(const Expr& f, double t, const Jet& rj, const Jet& vj) {
  const Jet s = vj * vj * (1.0 / (t * t)) - rj * rj;
  return apply_univariate(f, s);
}

class JetQuadrature {
 public:
  JetQuadrature(const Expr& f, const QuadratureOptions& opts, const Jet& rj,
                const Jet& vj)
      : f_(f), opts_(opts), rj_(rj), vj_(vj) {}

  Jet integrate(double a, double b) {
    Jet whole = panel(a, b);
    return refine(a, b, whole, 0);
  }

 private:
  Jet panel(double a, double b) const {
    const GaussLegendreRule& rule = panel_rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Jet acc(rj_.nvars(), rj_.order());
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      acc += integrand(f_, mid + half * rule.nodes[k], rj_, vj_) * (half * rule.weights[k]);
    }
    return acc;
  }

  Jet refine(double a, double b, const Jet& whole, int depth) {
    const double mid = 0.5 * (a + b);
    Jet left = panel(a, mid);
    Jet right = panel(mid, b);
    Jet sum = left + right;
    if (converged(whole, sum)) return sum;
    if (depth + 1 >= opts_.max_depth) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "quadrature did not converge within " << opts_.max_depth
          << " bisection levels near t in [" << a << ", " << b << "]";
      throw QuadratureError(msg.str());
    }
    // Left first: the fixed recursion order keeps sums bit-reproducible.
    Jet lhs = refine(a, mid, left, depth + 1);
    Jet rhs = refine(mid, b, right, depth + 1);
    return lhs + rhs;
  }

  bool converged(const Jet& coarse, const Jet& fine) const {
    const auto c = coarse.coefficients();
    const auto f = fine.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!(std::abs(c[i] - f[i]) <= opts_.abs_tol * std::max(1.0, std::abs(f[i])))) {
        return false;
      }
    }
    return true;
  }

  const Expr& f_;
  const QuadratureOptions& opts_;
  const Jet& rj_;
  const Jet& vj_;
};

Jet baseline_jet(const ProjectiveFamilySpec& spec, const Jet& rj, const Jet& vj) {
  const Jet r_args[] = {rj};
  Jet out = spec.g.eval(r_args) * vj;
  if (spec.baseline == Baseline::abs_corrected) {
    out += spec.h->eval(r_args) * abs(vj);
  }
  return out;
}

}  // namespace

GaussLegendreRule gauss_legendre(int points) {
  GaussLegendreRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (int i = 0; i < points; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

ProjectiveFamilySpec ProjectiveFamilySpec::from_strings(
    std::string_view f, std::string_view g, Baseline baseline,
    std::optional<std::string_view> h) {
  if (baseline == Baseline::abs_corrected && !h) {
    throw ConfigError("abs_corrected baseline needs h(r)");
  }
  if (baseline == Baseline::plain && h) {
    throw ConfigError("h(r) is only used with the abs_corrected baseline");
  }
  std::optional<Expr> h_expr;
  if (h) h_expr = Expr::parse(*h, {"r"});
  return ProjectiveFamilySpec{"family", Expr::parse(f, {"t"}), Expr::parse(g, {"r"}),
                              baseline, std::move(h_expr), QuadratureOptions{},
                              kUnbounded};
}

IntegrandScreen screen_integrand(const Expr& f) {
  constexpr int kGrid = 50;
  IntegrandScreen screen;
  std::vector<double> s(kGrid), w(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    s[k] = std::pow(10.0, -3.0 + 9.0 * k / (kGrid - 1));
    double value = 0.0;
    try {
      value = univariate(f, s[k], 0).d0;
    } catch (const DomainError&) {
      value = -1.0;
    }
    if (!(value > 0.0) && screen.positive) {
      screen.positive = false;
      screen.first_bad_s = s[k];
    }
    w[k] = value / std::sqrt(s[k]);
  }
  // Grid point one decade below the last one: 10^(5.08).
  constexpr int kDecadeBack = kGrid - 1 - (kGrid - 1) / 9;
  if (screen.positive && !(w[kGrid - 1] < 0.99 * w[kDecadeBack])) {
    screen.decays = false;
    screen.first_bad_s = s[kGrid - 1];
  }
  std::ostringstream msg;
  msg.precision(6);
  if (!screen.positive) {
    msg << "f(t) must be positive; fails at t = " << screen.first_bad_s;
  } else if (!screen.decays) {
    msg << "f(t) grows like sqrt(t) or faster for large t, so the integral "
           "diverges at its lower limit";
  }
  screen.message = msg.str();
  return screen;
}

Jet integral_jet(const ProjectiveFamilySpec& spec, double r, double u, double v,
                 int order) {
  if (!(u > 0.0)) throw DomainError("integral_jet: u must be positive", u);
  const Jet rj = Jet::variable(kR, r, 3, order);
  const Jet vj = Jet::variable(kV, v, 3, order);
  JetQuadrature quad(spec.f, spec.quad, rj, vj);
  Jet out = quad.integrate(0.0, u);
  if (order == 0) return out;

  // d/du of the integral is the integrand at t = u; every multi-index
  // containing u reads off a derivative of that.
  const int q_order = order - 1;
  const Jet rq = Jet::variable(kR, r, 3, q_order);
  const Jet uq = Jet::variable(kU, u, 3, q_order);
  const Jet vq = Jet::variable(kV, v, 3, q_order);
  const Jet q = apply_univariate(spec.f, vq * vq / (uq * uq) - rq * rq);
  out.set_d(kU, q.value());
  for (int a = 0; a < 3 && order >= 2; ++a) out.set_d(kU, a, q.d(a));
  for (int b = 0; b < 3 && order >= 3; ++b)
    for (int a = 0; a <= b; ++a) out.set_d(kU, a, b, q.d(a, b));
  return out;
}

SphericalMetric build_projective_metric(const ProjectiveFamilySpec& spec) {
  const IntegrandScreen screen = screen_integrand(spec.f);
  if (!screen.positive || !screen.decays) {
    throw ConfigError(spec.name + ": " + screen.message);
  }
  if (spec.baseline == Baseline::abs_corrected && !spec.h) {
    throw ConfigError(spec.name + ": abs_corrected baseline needs h(r)");
  }

  MetricInfo info;
  info.name = spec.name;
  info.domain_radius = spec.domain_radius;
  SphericalMetric metric(
      std::move(info),
      PhiJetFunction([spec](double r, double u, double v, int order) {
        Jet phi = integral_jet(spec, r, u, v, order);
        phi += baseline_jet(spec, Jet::variable(kR, r, 3, order),
                            Jet::variable(kV, v, 3, order));
        return phi;
      }));

  // Spot-check positivity across the radius range and both signs of v.
  const double r_max = std::min(0.95 * spec.domain_radius, 2.0);
  for (double r : {0.05, 0.5 * r_max, r_max}) {
    for (double v_frac : {-0.5, 0.5}) {
      const double v = v_frac * r;
      double phi = 0.0;
      try {
        phi = metric.phi(r, 1.0, v);
      } catch (const DomainError& e) {
        throw ConfigError(spec.name + ": cannot evaluate phi: " + e.what());
      }
      if (!(phi > 0.0)) {
        std::ostringstream msg;
        msg << spec.name << ": phi is not positive at (r, u, v) = (" << r
            << ", 1, " << v << "): " << phi;
        throw ConfigError(msg.str());
      }
    }
  }
  return metric;
}

}  // namespace finslerkit
