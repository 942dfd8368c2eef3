#include "finslerkit/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "finslerkit/errors.hpp"

namespace finslerkit {

namespace {

/// |y|^2 - (|x|^2|y|^2 - <x,y>^2), arranged to avoid cancellation.
Jet ball_radicand(const Jet& r, const Jet& u, const Jet& v) {
  return u * u * (1.0 - r * r) + v * v;
}

MetricInfo info_for(std::string name, double radius, double curvature,
                    std::map<std::string, double> params = {}) {
  MetricInfo info;
  info.name = std::move(name);
  info.domain_radius = radius;
  info.params = std::move(params);
  info.expected_curvature = curvature;
  return info;
}

SphericalMetric make_euclidean() {
  return SphericalMetric(info_for("euclidean", kUnbounded, 0.0),
                         PhiFunction([](const Jet&, const Jet& u, const Jet&) { return u; }));
}

SphericalMetric make_klein() {
  return SphericalMetric(info_for("klein", 1.0, -1.0),
                         PhiFunction([](const Jet& r, const Jet& u, const Jet& v) {
                           return sqrt(ball_radicand(r, u, v)) / (1.0 - r * r);
                         }));
}

SphericalMetric make_funk() {
  return SphericalMetric(info_for("funk", 1.0, -0.25),
                         PhiFunction([](const Jet& r, const Jet& u, const Jet& v) {
                           return (sqrt(ball_radicand(r, u, v)) + v) / (1.0 - r * r);
                         }));
}

SphericalMetric make_berwald() {
  return SphericalMetric(info_for("berwald", 1.0, 0.0),
                         PhiFunction([](const Jet& r, const Jet& u, const Jet& v) {
                           const Jet s = sqrt(ball_radicand(r, u, v));
                           const Jet q = 1.0 - r * r;
                           const Jet num = s + v;
                           return num * num / (q * q * s);
                         }));
}

SphericalMetric make_spherical() {
  return SphericalMetric(info_for("spherical", kUnbounded, 1.0),
                         PhiFunction([](const Jet& r, const Jet& u, const Jet& v) {
                           const Jet w = r * r * u * u - v * v;
                           return sqrt(u * u + w) / (1.0 + r * r);
                         }));
}

SphericalMetric make_bryant(double alpha) {
  if (!(alpha >= 0.0 && alpha < std::numbers::pi / 2)) {
    throw ConfigError("bryant: alpha must lie in [0, pi/2), got " +
                      std::to_string(alpha));
  }
  const double c = std::cos(2.0 * alpha);
  const double s = std::sin(2.0 * alpha);
  return SphericalMetric(
      info_for("bryant", kUnbounded, 1.0, {{"alpha", alpha}}),
      PhiFunction([c, s](const Jet& r, const Jet& u, const Jet& v) {
        const Jet u2 = u * u;
        const Jet w = r * r * u2 - v * v;
        const Jet B = c * u2 + w;
        const Jet su2 = s * u2;
        const Jet A = B * B + su2 * su2;
        const Jet rootA = sqrt(A);
        // sqrt(A) + B, rewritten as (sqrt(A)^2 - B^2)/(sqrt(A) - B) when B < 0.
        const Jet plus = B.value() >= 0.0 ? rootA + B : su2 * su2 / (rootA - B);
        const Jet r2 = r * r;
        const Jet D = r2 * r2 + 2.0 * c * r2 + 1.0;
        const Jet CD = s * v / D;
        return sqrt(plus / (2.0 * D) + CD * CD) + CD;
      }));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  // Optimal string alignment: insertions, deletions, substitutions and
  // adjacent transpositions.
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "euclidean", "klein", "funk", "berwald", "spherical", "bryant"};
  return names;
}

SphericalMetric builtin(std::string_view name,
                        const std::map<std::string, double>& params) {
  const auto allowed_keys = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [key, value] : params) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("builtin '" + std::string(name) +
                          "' has no parameter '" + key + "'");
      }
    }
  };
  if (name == "bryant") {
    allowed_keys({"alpha"});
    auto it = params.find("alpha");
    return make_bryant(it == params.end() ? 0.0 : it->second);
  }
  allowed_keys({});
  if (name == "euclidean") return make_euclidean();
  if (name == "klein") return make_klein();
  if (name == "funk") return make_funk();
  if (name == "berwald") return make_berwald();
  if (name == "spherical") return make_spherical();

  std::string msg = "unknown builtin metric '" + std::string(name) + "'";
  const std::string hint = closest_name(name, builtin_names());
  if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
  throw ConfigError(msg);
}

std::string closest_name(std::string_view name,
                         const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_distance = std::max<std::size_t>(2, name.size() / 2) + 1;
  for (const std::string& c : candidates) {
    const std::size_t dist = edit_distance(name, c);
    if (dist < best_distance) {
      best_distance = dist;
      best = c;
    }
  }
  return best;
}

}  // namespace finslerkit
