#include "finslerkit/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "finslerkit/builtins.hpp"
#include "finslerkit/errors.hpp"
#include "finslerkit/family.hpp"
#include "finslerkit/geodesic.hpp"
#include "finslerkit/projective.hpp"
#include "finslerkit/sampling.hpp"
#include "finslerkit/symmetry.hpp"

namespace finslerkit {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Config parsing

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      std::vector<std::string> names(keys.begin(), keys.end());
      std::string msg = where + ": unknown key '" + key + "'";
      const std::string hint = closest_name(key, names);
      if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
      throw ConfigError(msg);
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::map<std::string, double> number_map(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_number()) throw ConfigError(where + "." + key + " must be a number");
    out[key] = value.get<double>();
  }
  return out;
}

MetricConfig parse_metric(const json& m) {
  MetricConfig cfg;
  if (m.is_string()) {
    cfg.kind = MetricConfig::Kind::builtin;
    cfg.name = m.get<std::string>();
    return cfg;
  }
  if (!m.is_object()) throw ConfigError("metric must be a name or an object");

  if (m.contains("family")) {
    reject_unknown_keys(m, {"family", "name"}, "metric");
    const json& f = m.at("family");
    if (!f.is_object()) throw ConfigError("metric.family must be an object");
    reject_unknown_keys(f, {"f", "g", "h", "baseline", "domain_radius", "abs_tol", "max_depth"},
                        "metric.family");
    cfg.kind = MetricConfig::Kind::family;
    cfg.name = m.contains("name") ? get_string(m, "name", "metric") : "family";
    cfg.formulas["f"] = get_string(f, "f", "metric.family");
    cfg.formulas["g"] = f.contains("g") ? get_string(f, "g", "metric.family") : "0";
    if (f.contains("h")) cfg.formulas["h"] = get_string(f, "h", "metric.family");
    cfg.formulas["baseline"] =
        f.contains("baseline") ? get_string(f, "baseline", "metric.family") : "plain";
    if (f.contains("domain_radius")) {
      cfg.domain_radius = get_number(f, "domain_radius", "metric.family");
    }
    if (f.contains("abs_tol")) cfg.abs_tol = get_number(f, "abs_tol", "metric.family");
    if (f.contains("max_depth")) {
      cfg.max_depth = static_cast<int>(get_number(f, "max_depth", "metric.family"));
    }
    return cfg;
  }
  if (m.contains("general")) {
    reject_unknown_keys(m, {"general", "name"}, "metric");
    const json& g = m.at("general");
    if (!g.is_object()) throw ConfigError("metric.general must be an object");
    reject_unknown_keys(g, {"F", "domain_radius"}, "metric.general");
    cfg.kind = MetricConfig::Kind::general;
    cfg.name = m.contains("name") ? get_string(m, "name", "metric") : "general";
    cfg.formulas["F"] = get_string(g, "F", "metric.general");
    if (g.contains("domain_radius")) {
      cfg.domain_radius = get_number(g, "domain_radius", "metric.general");
    }
    return cfg;
  }
  if (m.contains("phi")) {
    reject_unknown_keys(m, {"phi", "name", "domain_radius"}, "metric");
    cfg.kind = MetricConfig::Kind::phi;
    cfg.name = m.contains("name") ? get_string(m, "name", "metric") : "phi";
    cfg.formulas["phi"] = get_string(m, "phi", "metric");
    if (m.contains("domain_radius")) cfg.domain_radius = get_number(m, "domain_radius", "metric");
    return cfg;
  }
  reject_unknown_keys(m, {"name", "params"}, "metric");
  if (!m.contains("name")) {
    throw ConfigError("metric needs one of: name, family, general, phi");
  }
  cfg.kind = MetricConfig::Kind::builtin;
  cfg.name = get_string(m, "name", "metric");
  if (m.contains("params")) cfg.params = number_map(m.at("params"), "metric.params");
  return cfg;
}

CheckConfig parse_check(const json& c) {
  CheckConfig cfg;
  if (c.is_string()) {
    cfg.name = c.get<std::string>();
  } else if (c.is_object()) {
    reject_unknown_keys(c, {"name", "params"}, "check");
    cfg.name = get_string(c, "name", "check");
    if (c.contains("params")) cfg.params = number_map(c.at("params"), "check.params");
  } else {
    throw ConfigError("each check must be a name or an object");
  }
  const auto& names = check_names();
  if (std::find(names.begin(), names.end(), cfg.name) == names.end()) {
    std::string msg = "unknown check '" + cfg.name + "'";
    const std::string hint = closest_name(cfg.name, names);
    if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
    throw ConfigError(msg);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Checks

struct Worst {
  double value = 0.0;
  std::size_t index = 0;
  bool any = false;

  void offer(double v, std::size_t i) {
    if (!std::isfinite(v)) v = kInf;
    if (!any || v > value) {
      value = v;
      index = i;
      any = true;
    }
  }
};

struct CheckContext {
  const Metric& metric;
  const std::vector<SamplePoint>& samples;
  const CheckConfig& check;
  double tolerance;
  const RunConfig& config;
  const RunOptions& options;

  double param(const char* key, double fallback) const {
    auto it = check.params.find(key);
    return it == check.params.end() ? fallback : it->second;
  }

  double tolerance_for(const std::string& key, double fallback) const {
    auto it = config.tolerances.find(key);
    return it == config.tolerances.end() ? fallback : it->second;
  }

  const SphericalMetric& spherical() const {
    const SphericalMetric* s = metric.spherical();
    if (!s) throw ConfigError("check '" + check.name + "' needs a spherically symmetric metric");
    return *s;
  }
};

CheckRecord base_record(const CheckContext& ctx) {
  CheckRecord rec;
  rec.check = ctx.check.name;
  rec.metric = ctx.metric.name();
  rec.samples = ctx.samples.size();
  rec.tolerance = ctx.tolerance;
  return rec;
}

void finish(CheckRecord& rec, const CheckContext& ctx, const Worst& worst) {
  rec.max_residual = worst.value;
  if (worst.any) {
    rec.worst_x = ctx.samples[worst.index].x;
    rec.worst_y = ctx.samples[worst.index].y;
  }
  rec.pass = worst.value <= rec.tolerance;
}

template <typename F>
CheckRecord max_over_samples(const CheckContext& ctx, F residual) {
  CheckRecord rec = base_record(ctx);
  Worst worst;
  for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
    worst.offer(residual(ctx.samples[i]), i);
  }
  finish(rec, ctx, worst);
  return rec;
}

CheckRecord check_symmetry(const CheckContext& ctx) {
  const SymmetryVerdict v = symmetry_verdict(ctx.metric, ctx.samples, ctx.tolerance);
  CheckRecord rec = base_record(ctx);
  rec.max_residual = v.max_residual;
  rec.worst_x = ctx.samples[v.worst_sample].x;
  rec.worst_y = ctx.samples[v.worst_sample].y;
  rec.pass = v.pass;
  rec.details.emplace_back("fields_tested", static_cast<double>(v.fields_tested));
  rec.details.emplace_back(
      "worst_field",
      std::vector<double>{static_cast<double>(v.worst_field_i), static_cast<double>(v.worst_field_j)});
  rec.details.emplace_back("verdict", v.verdict);
  return rec;
}

CheckRecord check_killing_tensor(const CheckContext& ctx) {
  const int n = ctx.config.dimension;
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    double worst = 0.0;
    for (const RotationField& field : rotation_fields(n)) {
      worst = std::max(worst, killing_tensor_residual(ctx.metric, field, s.x, s.y).relative);
    }
    return worst;
  });
}

CheckRecord check_rapcsak(const CheckContext& ctx) {
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    return rapcsak_residual(ctx.metric, s.x, s.y).maxCoeff();
  });
}

CheckRecord check_projective_pde(const CheckContext& ctx) {
  const SphericalMetric& m = ctx.spherical();
  double first = 0.0, second = 0.0;
  CheckRecord rec = max_over_samples(ctx, [&](const SamplePoint& s) {
    const SphericalInvariants p = invariants_of(s.x, s.y);
    const PdeResiduals res = projective_pde_residuals(m, p.r, p.u, p.v);
    first = std::max(first, res.first);
    second = std::max(second, res.second);
    return res.max();
  });
  rec.details.emplace_back("max_first", first);
  rec.details.emplace_back("max_second", second);
  return rec;
}

CheckRecord check_curvature(const CheckContext& ctx) {
  const SphericalMetric& m = ctx.spherical();
  CurvatureTolerances tol;
  tol.pde = ctx.tolerance;
  tol.deviation = ctx.tolerance_for("curvature_deviation", tol.deviation);
  tol.deviation = ctx.param("deviation_tolerance", tol.deviation);
  std::optional<double> lambda;
  if (auto it = ctx.check.params.find("lambda"); it != ctx.check.params.end()) {
    lambda = it->second;
  }
  const CurvatureVerdict v = constant_curvature_verdict(m, ctx.samples, lambda, tol);
  CheckRecord rec = base_record(ctx);
  rec.pass = v.pass;
  rec.details.emplace_back("status", v.describe());
  if (v.status == CurvatureVerdict::Status::not_projective) {
    rec.max_residual = v.projectivity_residual;
    rec.details.emplace_back("projectivity_residual", v.projectivity_residual);
    return rec;
  }
  rec.max_residual = v.curvature_pde_residual.max();
  rec.worst_x = ctx.samples[v.worst_sample].x;
  rec.worst_y = ctx.samples[v.worst_sample].y;
  if (lambda) rec.details.emplace_back("lambda_hypothesis", *lambda);
  rec.details.emplace_back("lambda_estimate", v.lambda_estimate);
  rec.details.emplace_back("max_deviation", v.max_deviation);
  rec.details.emplace_back("deviation_tolerance", tol.deviation);
  rec.details.emplace_back(
      "curvature_pde_residual", std::vector<double>{v.curvature_pde_residual.first, v.curvature_pde_residual.second});
  return rec;
}

CheckRecord check_geodesics(const CheckContext& ctx) {
  const std::size_t count = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(1.0, ctx.param("count", 20))), ctx.samples.size());
  const int steps = static_cast<int>(ctx.param("steps", 2000));
  const double horizon = ctx.param("horizon", 0.5);
  CheckRecord rec = base_record(ctx);
  rec.samples = count;
  Worst worst;
  double exits = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const SamplePoint& s = ctx.samples[i];
    const double h = shrink_horizon(ctx.metric, s.x, s.y, horizon);
    if (!(h > 0.0)) continue;
    const GeodesicPath path = integrate_geodesic(ctx.metric, s.x, s.y, h, steps);
    if (path.exit_time) exits += 1.0;
    worst.offer(straightness_deviation(path, s.x, s.y), i);
    if (ctx.options.dump_geodesics_dir) {
      std::filesystem::create_directories(*ctx.options.dump_geodesics_dir);
      std::ostringstream file;
      file << *ctx.options.dump_geodesics_dir << "/" << ctx.metric.name() << "_" << i
           << ".csv";
      std::ofstream out(file.str());
      write_geodesic_csv(out, path);
    }
  }
  finish(rec, ctx, worst);
  rec.details.emplace_back("steps", static_cast<double>(steps));
  rec.details.emplace_back("early_exits", exits);
  return rec;
}

CheckRecord check_homogeneity(const CheckContext& ctx) {
  const SphericalMetric* m = ctx.metric.spherical();
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    double r = homogeneity_residual_xy(ctx.metric, s.x, s.y);
    if (m) {
      const SphericalInvariants p = invariants_of(s.x, s.y);
      r = std::max(r, homogeneity_residual(*m, p.r, p.u, p.v));
    }
    return r;
  });
}

CheckRecord check_convexity(const CheckContext& ctx) {
  const SphericalMetric* m = ctx.metric.spherical();
  double lemma_ok = 0.0, direct_pd = 0.0, implication_failures = 0.0;
  CheckRecord rec = max_over_samples(ctx, [&](const SamplePoint& s) {
    const Matrix g = m ? fundamental_tensor(*m, s.x, s.y)
                       : fundamental_tensor_ad(ctx.metric, s.x, s.y);
    bool pd = false;
    if (m) {
      const ConvexityReport c = convexity_report(*m, s.x, s.y);
      lemma_ok += c.lemma_ok ? 1.0 : 0.0;
      pd = c.direct_pd;
      if (c.lemma_ok && !c.direct_pd) implication_failures += 1.0;
    } else {
      pd = Eigen::LLT<Matrix>(g).info() == Eigen::Success;
    }
    direct_pd += pd ? 1.0 : 0.0;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    // 0 when positive definite, otherwise how negative the spectrum reaches.
    return pd ? 0.0 : std::max(-lo / hi, 0.0);
  });
  if (m) rec.details.emplace_back("lemma_ok", lemma_ok);
  rec.details.emplace_back("direct_pd", direct_pd);
  if (m) rec.details.emplace_back("lemma_without_pd", implication_failures);
  rec.pass = rec.pass && direct_pd == static_cast<double>(ctx.samples.size()) &&
             implication_failures == 0.0;
  return rec;
}

CheckRecord check_determinant(const CheckContext& ctx) {
  const SphericalMetric& m = ctx.spherical();
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    const double closed = det_g_closed_form(m, s.x, s.y);
    const double direct = fundamental_tensor(m, s.x, s.y).determinant();
    return std::abs(closed - direct) / std::abs(direct);
  });
}

CheckRecord check_fundamental_tensor(const CheckContext& ctx) {
  const SphericalMetric& m = ctx.spherical();
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    const Matrix closed = fundamental_tensor(m, s.x, s.y);
    const Matrix ad = fundamental_tensor_ad(ctx.metric, s.x, s.y);
    return (closed - ad).cwiseAbs().maxCoeff() / ad.cwiseAbs().maxCoeff();
  });
}

CheckRecord check_cartan(const CheckContext& ctx) {
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    return cartan_contraction_residual(ctx.metric, s.x, s.y);
  });
}

CheckRecord check_spray(const CheckContext& ctx) {
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    return spray_projectivity_residual(ctx.metric, s.x, s.y);
  });
}

double reversibility_at(const Metric& metric, const SamplePoint& s) {
  if (const SphericalMetric* m = metric.spherical()) {
    const SphericalInvariants p = invariants_of(s.x, s.y);
    return reversibility_residual(*m, p.r, p.u, p.v);
  }
  std::vector<double> minus_y(s.y);
  for (double& t : minus_y) t = -t;
  const double F = evaluate_F(metric, s.x, s.y);
  return std::abs(evaluate_F(metric, s.x, minus_y) - F) / F;
}

CheckRecord check_reversibility(const CheckContext& ctx) {
  return max_over_samples(ctx, [&](const SamplePoint& s) {
    return reversibility_at(ctx.metric, s);
  });
}

std::vector<std::vector<double>> probe_directions(const std::vector<double>& y) {
  const std::size_t n = y.size();
  double u = 0.0;
  for (double t : y) u += t * t;
  u = std::sqrt(u);
  std::vector<std::vector<double>> ys;
  ys.push_back(y);
  std::vector<double> minus(y);
  for (double& t : minus) t = -t;
  ys.push_back(minus);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = u;
    ys.push_back(e);
  }
  std::vector<double> turned(y);
  turned[0] = -y[1];
  turned[1] = y[0];
  ys.push_back(turned);
  return ys;
}

CheckRecord check_conjecture(const CheckContext& ctx) {
  const SphericalMetric& m = ctx.spherical();
  CheckRecord rec = base_record(ctx);
  const double reversibility_tol = ctx.tolerance_for("reversibility", default_tolerance("reversibility"));
  double reversibility = 0.0;
  for (const SamplePoint& s : ctx.samples) {
    reversibility = std::max(reversibility, reversibility_at(ctx.metric, s));
  }
  const bool reversible = reversibility <= reversibility_tol;

  CurvatureTolerances tol;
  tol.deviation = ctx.tolerance_for("curvature_deviation", tol.deviation);
  tol.pde = ctx.tolerance_for("curvature", tol.pde);
  const CurvatureVerdict curvature = constant_curvature_verdict(m, ctx.samples, std::nullopt, tol);
  const bool constant = curvature.pass;

  rec.details.emplace_back("reversible", reversible);
  rec.details.emplace_back("reversibility_residual", reversibility);
  rec.details.emplace_back("constant_curvature", constant);
  rec.details.emplace_back("curvature_status", curvature.describe());
  if (curvature.status != CurvatureVerdict::Status::not_projective) {
    rec.details.emplace_back("lambda_estimate", curvature.lambda_estimate);
  }

  bool riemannian = false;
  if (reversible && constant) {
    Worst spread;
    double cartan = 0.0;
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
      const SamplePoint& s = ctx.samples[i];
      const RiemannianProbe probe = riemannian_probe(ctx.metric, s.x, probe_directions(s.y));
      spread.offer(probe.g_spread, i);
      cartan = std::max(cartan, probe.max_cartan);
    }
    finish(rec, ctx, spread);
    riemannian = rec.pass;
    rec.details.emplace_back("riemannian", riemannian);
    rec.details.emplace_back("max_cartan", cartan);
  } else {
    rec.details.emplace_back("riemannian", DetailValue{});
  }
  // The probe can only fail to find a counterexample; it never proves the
  // conjecture.
  const bool counterexample = reversible && constant && !riemannian;
  rec.pass = !counterexample;
  rec.details.emplace_back("verdict",
                           std::string(counterexample ? "counterexample candidate" : "consistent"));
  return rec;
}

using CheckFn = CheckRecord (*)(const CheckContext&);

struct CheckEntry {
  const char* name;
  double tolerance;
  CheckFn fn;
};

const std::vector<CheckEntry>& check_table() {
  static const std::vector<CheckEntry> table = {
      {"symmetry", 1e-9, check_symmetry},
      {"killing_tensor", 1e-8, check_killing_tensor},
      {"rapcsak", 1e-8, check_rapcsak},
      {"projective_pde", 1e-8, check_projective_pde},
      {"curvature", 1e-8, check_curvature},
      {"geodesics", 1e-6, check_geodesics},
      {"homogeneity", 1e-10, check_homogeneity},
      {"convexity", 0.0, check_convexity},
      {"determinant", 1e-8, check_determinant},
      {"fundamental_tensor", 1e-9, check_fundamental_tensor},
      {"cartan", 1e-9, check_cartan},
      {"spray", 1e-8, check_spray},
      {"reversibility", 1e-9, check_reversibility},
      {"conjecture", 1e-9, check_conjecture},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Rendering

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  return format17(x);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_number(v[i]);
  }
  return out + "]";
}

std::string json_detail(const DetailValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const { return json_number(d); }
    std::string operator()(const std::string& s) const { return json_string(s); }
    std::string operator()(const std::vector<double>& a) const { return json_array(a); }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : check_table()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

double default_tolerance(const std::string& check) {
  for (const auto& e : check_table()) {
    if (check == e.name) return e.tolerance;
  }
  throw ConfigError("unknown check '" + check + "'");
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc, {"metric", "dimension", "sampling", "checks", "tolerances"}, "config");
  if (!doc.contains("metric")) throw ConfigError("config: missing 'metric'");
  if (!doc.contains("checks")) throw ConfigError("config: missing 'checks'");

  RunConfig cfg;
  try {
    cfg.metric = parse_metric(doc.at("metric"));
    if (doc.contains("dimension")) {
      const json& d = doc.at("dimension");
      if (!d.is_number_integer()) throw ConfigError("dimension must be an integer");
      cfg.dimension = d.get<int>();
    }
    if (doc.contains("sampling")) {
      const json& s = doc.at("sampling");
      if (!s.is_object()) throw ConfigError("sampling must be an object");
      reject_unknown_keys(s, {"count", "seed"}, "sampling");
      if (s.contains("count")) {
        if (!s.at("count").is_number_integer()) throw ConfigError("sampling.count must be an integer");
        cfg.count = s.at("count").get<int>();
      }
      if (s.contains("seed")) {
        if (!s.at("seed").is_number_unsigned()) {
          throw ConfigError("sampling.seed must be a non-negative integer");
        }
        cfg.seed = s.at("seed").get<std::uint64_t>();
      }
    }
    const json& checks = doc.at("checks");
    if (!checks.is_array() || checks.empty()) {
      throw ConfigError("checks must be a nonempty array");
    }
    for (const json& c : checks) cfg.checks.push_back(parse_check(c));
    if (doc.contains("tolerances")) {
      cfg.tolerances = number_map(doc.at("tolerances"), "tolerances");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.dimension < 2 || cfg.dimension > 4) {
    throw ConfigError("dimension must be 2, 3 or 4");
  }
  if (cfg.count < 1) throw ConfigError("sampling.count must be at least 1");
  return cfg;
}

Metric build_metric(const MetricConfig& config, int dimension) {
  auto with_context = [&](const std::string& field, auto&& make) {
    try {
      return make();
    } catch (const ParseError& e) {
      throw ConfigError("metric " + field + ": " + e.what());
    }
  };
  switch (config.kind) {
    case MetricConfig::Kind::builtin:
      return Metric(builtin(config.name, config.params));
    case MetricConfig::Kind::phi:
      return with_context("phi", [&] {
        return Metric(SphericalMetric::from_expression(config.name, config.formulas.at("phi"),
                                                       config.domain_radius));
      });
    case MetricConfig::Kind::general:
      return with_context("general.F", [&] {
        return Metric(GeneralMetric::from_expression(config.name, config.formulas.at("F"),
                                                     dimension, config.domain_radius));
      });
    case MetricConfig::Kind::family: {
      const std::string& baseline_name = config.formulas.at("baseline");
      Baseline baseline;
      if (baseline_name == "plain") {
        baseline = Baseline::plain;
      } else if (baseline_name == "abs_corrected") {
        baseline = Baseline::abs_corrected;
      } else {
        throw ConfigError("metric.family.baseline must be 'plain' or 'abs_corrected'");
      }
      std::optional<std::string_view> h;
      if (auto it = config.formulas.find("h"); it != config.formulas.end()) h = it->second;
      ProjectiveFamilySpec spec = with_context("family", [&] {
        return ProjectiveFamilySpec::from_strings(config.formulas.at("f"),
                                                  config.formulas.at("g"), baseline, h);
      });
      spec.name = config.name;
      spec.domain_radius = config.domain_radius;
      spec.quad.abs_tol = config.abs_tol;
      spec.quad.max_depth = config.max_depth;
      return Metric(build_projective_metric(spec));
    }
  }
  throw ConfigError("unsupported metric kind");
}

Report run(const RunConfig& config, const RunOptions& options) {
  const Metric metric = build_metric(config.metric, config.dimension);
  if (metric.dimension() != 0 && metric.dimension() != config.dimension) {
    throw ConfigError("metric dimension does not match config dimension");
  }
  SampleSpec spec =
      SampleSpec::for_domain(config.dimension, config.count, config.seed, metric.domain_radius());
  spec.validate(metric.domain_radius());
  const std::vector<SamplePoint> samples = sample_domain(spec);

  static const char* const kSphericalOnly[] = {"projective_pde", "curvature", "determinant",
                                               "fundamental_tensor", "conjecture"};
  for (const CheckConfig& check : config.checks) {
    if (!metric.spherical() &&
        std::find(std::begin(kSphericalOnly), std::end(kSphericalOnly), check.name) !=
            std::end(kSphericalOnly)) {
      throw ConfigError("check '" + check.name + "' needs a spherically symmetric metric");
    }
  }

  Report report;
  report.metric = metric.name();
  report.dimension = config.dimension;
  report.seed = config.seed;
  report.count = config.count;
  for (const CheckConfig& check : config.checks) {
    const auto& table = check_table();
    const auto entry = std::find_if(table.begin(), table.end(),
                                    [&](const CheckEntry& e) { return check.name == e.name; });
    double tolerance = entry->tolerance;
    if (auto it = config.tolerances.find(check.name); it != config.tolerances.end()) {
      tolerance = it->second;
    }
    if (auto it = check.params.find("tolerance"); it != check.params.end()) {
      tolerance = it->second;
    }
    const CheckContext ctx{metric, samples, check, tolerance, config, options};
    CheckRecord rec;
    try {
      rec = entry->fn(ctx);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      rec = base_record(ctx);
      rec.max_residual = kInf;
      rec.pass = false;
      rec.details.emplace_back("error", std::string(e.what()));
    }
    report.records.push_back(std::move(rec));
  }
  report.pass = std::all_of(report.records.begin(), report.records.end(),
                            [](const CheckRecord& r) { return r.pass; });
  return report;
}

std::string render_json(const Report& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"metric\": " << json_string(report.metric) << ",\n";
  out << "  \"dimension\": " << report.dimension << ",\n";
  out << "  \"seed\": " << report.seed << ",\n";
  out << "  \"samples\": " << report.count << ",\n";
  out << "  \"records\": [";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const CheckRecord& r = report.records[i];
    out << (i ? ",\n" : "\n") << "    {\n";
    out << "      \"check\": " << json_string(r.check) << ",\n";
    out << "      \"metric\": " << json_string(r.metric) << ",\n";
    out << "      \"samples\": " << r.samples << ",\n";
    out << "      \"max_residual\": " << json_number(r.max_residual) << ",\n";
    out << "      \"tolerance\": " << json_number(r.tolerance) << ",\n";
    if (r.worst_x.empty()) {
      out << "      \"worst_point\": null,\n";
    } else {
      out << "      \"worst_point\": {\"x\": " << json_array(r.worst_x)
          << ", \"y\": " << json_array(r.worst_y) << "},\n";
    }
    out << "      \"pass\": " << (r.pass ? "true" : "false") << ",\n";
    out << "      \"details\": {";
    for (std::size_t k = 0; k < r.details.size(); ++k) {
      out << (k ? ", " : "") << json_string(r.details[k].first) << ": "
          << json_detail(r.details[k].second);
    }
    out << "}\n    }";
  }
  out << (report.records.empty() ? "],\n" : "\n  ],\n");
  out << "  \"pass\": " << (report.pass ? "true" : "false") << "\n";
  out << "}\n";
  return out.str();
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  out << "metric " << report.metric << "  dimension " << report.dimension << "  samples "
      << report.count << "  seed " << report.seed << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %8s %25s %12s  %s\n", "check", "samples",
                "max residual", "tolerance", "result");
  out << line;
  for (const CheckRecord& r : report.records) {
    std::snprintf(line, sizeof line, "%-20s %8zu %25s %12.3g  %s\n", r.check.c_str(),
                  r.samples, format17(r.max_residual).c_str(), r.tolerance,
                  r.pass ? "PASS" : "FAIL");
    out << line;
    for (const auto& [key, value] : r.details) {
      out << "    " << key << ": ";
      if (const auto* s = std::get_if<std::string>(&value)) {
        out << *s;
      } else {
        out << json_detail(value);
      }
      out << "\n";
    }
  }
  out << "\noverall " << (report.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

int run_config(const std::string& path, const CliOverrides& overrides, std::string& out,
               std::string& err) {
  RunConfig config;
  Report report;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    config = parse_config(buf.str());
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.samples) {
      if (*overrides.samples < 1) throw ConfigError("--samples must be at least 1");
      config.count = *overrides.samples;
    }
    RunOptions options;
    options.dump_geodesics_dir = overrides.dump_geodesics_dir;
    report = run(config, options);
  } catch (const ConfigError& e) {
    err = std::string("config error: ") + e.what() + "\n";
    return kExitConfigError;
  } catch (const ParseError& e) {
    err = std::string("parse error: ") + e.what() + "\n";
    return kExitConfigError;
  }
  out = overrides.json ? render_json(report) : render_text(report);
  return report.pass ? kExitPass : kExitCheckFailed;
}

}  // namespace finslerkit
