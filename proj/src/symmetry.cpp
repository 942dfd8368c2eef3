#include "finslerkit/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace finslerkit {

RotationField::RotationField(int i, int j) : i_(i), j_(j) {
  if (i < 0 || j < 0 || i == j) {
    throw std::invalid_argument("rotation field needs two distinct axes");
  }
}

Vector RotationField::at(std::span<const double> x) const {
  const int n = static_cast<int>(x.size());
  if (std::max(i_, j_) >= n) throw std::out_of_range("rotation field axis");
  Vector X = Vector::Zero(n);
  X(i_) = x[j_];
  X(j_) = -x[i_];
  return X;
}

Matrix RotationField::jacobian(int n) const {
  if (std::max(i_, j_) >= n) throw std::out_of_range("rotation field axis");
  Matrix J = Matrix::Zero(n, n);
  J(i_, j_) = 1.0;
  J(j_, i_) = -1.0;
  return J;
}

std::vector<RotationField> rotation_fields(int n) {
  std::vector<RotationField> fields;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) fields.emplace_back(i, j);
  return fields;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3 cartan_tensor(const Metric& metric, std::span<const double> x,
                      std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 3);
  const Jet F2 = F * F;
  Tensor3 C(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) C(i, j, k) = 0.25 * F2.d(n + i, n + j, n + k);
  return C;
}

double cartan_contraction_residual(const Metric& metric,
                                   std::span<const double> x,
                                   std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 3);
  const Jet F2 = F * F;
  double worst = 0.0;
  double g_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double contraction = 0.0;
      for (int p = 0; p < n; ++p) contraction += 0.25 * F2.d(n + i, n + j, n + p) * y[p];
      worst = std::max(worst, std::abs(contraction));
      g_scale = std::max(g_scale, std::abs(0.5 * F2.d(n + i, n + j)));
    }
  }
  return g_scale > 0.0 ? worst / g_scale : worst;
}

Residual killing_scalar_residual(const Metric& metric, const RotationField& field,
                                 std::span<const double> x,
                                 std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 1);
  const Vector X = field.at(x);
  const Matrix J = field.jacobian(n);
  Residual res;
  for (int i = 0; i < n; ++i) {
    if (X(i) != 0.0) res.add(F.d(i) * X(i));
    for (int j = 0; j < n; ++j) {
      if (J(i, j) != 0.0) res.add(F.d(n + i) * J(i, j) * y[j]);
    }
  }
  return res;
}

TensorResidual killing_tensor_residual(const Metric& metric,
                                       const RotationField& field,
                                       std::span<const double> x,
                                       std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  const Jet F = metric.xy_jet(x, y, 3);
  const Jet F2 = F * F;
  const Vector X = field.at(x);
  const Matrix J = field.jacobian(n);
  Vector Jy = Vector::Zero(n);
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k) Jy(p) += J(p, k) * y[k];

  auto g = [&](int i, int j) { return 0.5 * F2.d(n + i, n + j); };
  auto dg_dx = [&](int i, int j, int p) { return 0.5 * F2.d(n + i, n + j, p); };
  auto C = [&](int i, int j, int p) { return 0.25 * F2.d(n + i, n + j, n + p); };

  TensorResidual out;
  out.raw = Matrix::Zero(n, n);
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Residual res;
      for (int p = 0; p < n; ++p) {
        res.add(dg_dx(i, j, p) * X(p));
        res.add(g(p, j) * J(p, i));
        res.add(g(i, p) * J(p, j));
        res.add(2.0 * C(i, j, p) * Jy(p));
      }
      out.raw(i, j) = res.raw;
      worst = std::max(worst, std::abs(res.raw));
      scale = std::max(scale, res.scale);
    }
  }
  out.relative = scale > 0.0 ? worst / scale : 0.0;
  return out;
}

SymmetryVerdict symmetry_verdict(const Metric& metric,
                                 const std::vector<SamplePoint>& samples,
                                 double tolerance) {
  SymmetryVerdict verdict;
  verdict.tolerance = tolerance;
  if (samples.empty()) throw std::invalid_argument("symmetry_verdict: no samples");
  const int n = static_cast<int>(samples.front().x.size());
  const auto fields = rotation_fields(n);
  verdict.fields_tested = static_cast<int>(fields.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (const RotationField& field : fields) {
      double rel =
          killing_scalar_residual(metric, field, samples[s].x, samples[s].y).relative();
      if (!std::isfinite(rel)) rel = std::numeric_limits<double>::infinity();
      if (verdict.worst_field_i < 0 || rel > verdict.max_residual) {
        verdict.max_residual = rel;
        verdict.worst_field_i = field.i();
        verdict.worst_field_j = field.j();
        verdict.worst_sample = s;
      }
    }
  }
  verdict.pass = verdict.max_residual <= tolerance;
  verdict.verdict = verdict.pass ? "consistent with spherical symmetry"
                                 : "not spherically symmetric";
  return verdict;
}

RiemannianProbe riemannian_probe(const Metric& metric, std::span<const double> x,
                                 const std::vector<std::vector<double>>& ys) {
  RiemannianProbe probe;
  std::vector<Matrix> gs;
  double g_scale = 0.0;
  for (const auto& y : ys) {
    gs.push_back(fundamental_tensor_ad(metric, x, y));
    g_scale = std::max(g_scale, gs.back().cwiseAbs().maxCoeff());
    double ynorm = 0.0;
    for (double t : y) ynorm += t * t;
    probe.max_cartan =
        std::max(probe.max_cartan, cartan_tensor(metric, x, y).max_abs() * std::sqrt(ynorm));
  }
  for (std::size_t a = 0; a < gs.size(); ++a)
    for (std::size_t b = a + 1; b < gs.size(); ++b)
      probe.g_spread = std::max(probe.g_spread, (gs[a] - gs[b]).cwiseAbs().maxCoeff());
  if (g_scale > 0.0) {
    probe.g_spread /= g_scale;
    probe.max_cartan /= g_scale;
  }
  return probe;
}

}  // namespace finslerkit
