#include "finslerkit/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "finslerkit/errors.hpp"

namespace finslerkit {

namespace {

using Vec = std::vector<double>;

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double t : a) s += t * t;
  return std::sqrt(s);
}

Vec axpy(const Vec& base, double h, const Vec& dir) {
  Vec out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + h * dir[i];
  return out;
}

/// Acceleration -2 G(x, y).
Vec acceleration(const Metric& metric, const Vec& x, const Vec& y) {
  const Vector G = spray_general(metric, x, y);
  Vec a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = -2.0 * G(static_cast<int>(i));
  return a;
}

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Vector spray_general(const Metric& metric, std::span<const double> x,
                     std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 2);
  const Jet F2 = F * F;
  Matrix g(n, n);
  Vector rhs(n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) g(l, j) = 0.5 * F2.d(n + l, n + j);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += F2.d(k, n + l) * y[k];
    rhs(l) = 0.25 * (s - F2.d(l));
  }
  Eigen::LLT<Matrix> llt(g);
  if (!g.allFinite() || llt.info() != Eigen::Success) {
    throw ConvexityError(metric.name() + ": not strongly convex here (g is not "
                                         "positive definite)");
  }
  return llt.solve(rhs);
}

double spray_projectivity_residual(const Metric& metric, std::span<const double> x,
                                   std::span<const double> y) {
  const Vector G = spray_general(metric, x, y);
  const Jet F = metric.xy_jet(x, y, 1);
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += F.d(k) * y[k];
  const double P = s / (2.0 * F.value());
  Vector Py(n);
  for (int i = 0; i < n; ++i) Py(i) = P * y[i];
  const double scale = G.norm() + Py.norm();
  return scale > 0.0 ? (G - Py).norm() / scale : 0.0;
}

double shrink_horizon(const Metric& metric, std::span<const double> x0,
                      std::span<const double> y0, double horizon) {
  const double R = metric.domain_radius();
  if (!std::isfinite(R)) return horizon;
  const double limit = 0.95 * R;
  // Solve |x0 + t y0| = limit for the positive root.
  double a = 0.0, b = 0.0, c = -limit * limit;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    a += y0[i] * y0[i];
    b += 2.0 * x0[i] * y0[i];
    c += x0[i] * x0[i];
  }
  if (c >= 0.0) return 0.0;
  const double t = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  return std::min(horizon, t);
}

GeodesicPath integrate_geodesic(const Metric& metric, std::span<const double> x0,
                                std::span<const double> y0, double horizon,
                                int steps) {
  if (steps < 1 || !(horizon > 0.0)) {
    throw std::invalid_argument("integrate_geodesic: need steps >= 1 and horizon > 0");
  }
  if (x0.size() != y0.size() || !(norm(y0) > 0.0)) {
    throw std::invalid_argument("integrate_geodesic: bad initial data");
  }
  const double h = horizon / steps;
  const double R = metric.domain_radius();
  GeodesicPath path;
  Vec x(x0.begin(), x0.end());
  Vec y(y0.begin(), y0.end());
  path.times.push_back(0.0);
  path.points.push_back(x);
  path.velocities.push_back(y);

  for (int step = 1; step <= steps; ++step) {
    try {
      const Vec k1x = y;
      const Vec k1y = acceleration(metric, x, y);
      const Vec x2 = axpy(x, 0.5 * h, k1x), y2 = axpy(y, 0.5 * h, k1y);
      const Vec k2y = acceleration(metric, x2, y2);
      const Vec x3 = axpy(x, 0.5 * h, y2), y3 = axpy(y, 0.5 * h, k2y);
      const Vec k3y = acceleration(metric, x3, y3);
      const Vec x4 = axpy(x, h, y3), y4 = axpy(y, h, k3y);
      const Vec k4y = acceleration(metric, x4, y4);
      Vec xn(x.size()), yn(y.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        xn[i] = x[i] + h / 6.0 * (k1x[i] + 2.0 * y2[i] + 2.0 * y3[i] + y4[i]);
        yn[i] = y[i] + h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
      }
      if (!(norm(xn) < R) || !(norm(yn) > 0.0)) {
        path.exit_time = step * h;
        break;
      }
      x = std::move(xn);
      y = std::move(yn);
    } catch (const DomainError&) {
      path.exit_time = step * h;
      break;
    } catch (const ConvexityError&) {
      path.exit_time = step * h;
      break;
    }
    path.times.push_back(step * h);
    path.points.push_back(x);
    path.velocities.push_back(y);
  }
  return path;
}

double straightness_deviation(const GeodesicPath& path, std::span<const double> x0,
                              std::span<const double> y0) {
  const double ynorm = norm(y0);
  if (!(ynorm > 0.0)) throw std::invalid_argument("straightness: y0 = 0");
  double worst = 0.0;
  double length = 0.0;
  const std::size_t n = x0.size();
  for (std::size_t s = 0; s < path.points.size(); ++s) {
    const Vec& p = path.points[s];
    double along = 0.0;
    for (std::size_t i = 0; i < n; ++i) along += (p[i] - x0[i]) * y0[i];
    along /= ynorm * ynorm;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = p[i] - x0[i] - along * y0[i];
      dist2 += d * d;
    }
    worst = std::max(worst, std::sqrt(dist2));
    if (s > 0) {
      double seg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = p[i] - path.points[s - 1][i];
        seg += d * d;
      }
      length += std::sqrt(seg);
    }
  }
  return length > 0.0 ? worst / length : 0.0;
}

void write_geodesic_csv(std::ostream& out, const GeodesicPath& path) {
  const std::size_t n = path.points.empty() ? 0 : path.points.front().size();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",y" << i;
  out << "\n";
  for (std::size_t s = 0; s < path.times.size(); ++s) {
    out << format17(path.times[s]);
    for (double v : path.points[s]) out << ',' << format17(v);
    for (double v : path.velocities[s]) out << ',' << format17(v);
    out << "\n";
  }
}

}  // namespace finslerkit
