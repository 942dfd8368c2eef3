#ifndef FINSLERKIT_SYMMETRY_HPP
#define FINSLERKIT_SYMMETRY_HPP

#include <span>
#include <string>
#include <vector>

#include "finslerkit/metric.hpp"
#include "finslerkit/residual.hpp"

namespace finslerkit {

/// Rotation generator X = x^j e_i - x^i e_j in the (i, j) coordinate plane
/// (0-based axes).
class RotationField {
 public:
  RotationField(int i, int j);

  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

  Vector at(std::span<const double> x) const;
  /// Constant Jacobian dX^p/dx^k (antisymmetric, entries in {-1, 0, 1}).
  Matrix jacobian(int n) const;

 private:
  int i_;
  int j_;
};

/// All n(n-1)/2 generators, ordered (0,1), (0,2), ..., (n-2,n-1).
std::vector<RotationField> rotation_fields(int n);

/// Fully symmetric n x n x n tensor stored densely.
class Tensor3 {
 public:
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dimension() const noexcept { return n_; }
  double& operator()(int i, int j, int k) { return data_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(i * n_ + j) * n_ + k]; }
  double max_abs() const;

 private:
  int n_;
  std::vector<double> data_;
};

/// C_ijk = 1/2 dg_ij/dy^k = 1/4 d^3(F^2)/dy^i dy^j dy^k.
Tensor3 cartan_tensor(const Metric& metric, std::span<const double> x,
                      std::span<const double> y);

/// max_ij |C_ijp y^p| / max_ij |g_ij|; vanishes by 0-homogeneity of g.
double cartan_contraction_residual(const Metric& metric,
                                   std::span<const double> x,
                                   std::span<const double> y);

/// F_{x^i} X^i + F_{y^i} (dX^i/dx^j) y^j; relative() divides by the sum of
/// the absolute values of the four nonzero terms.
Residual killing_scalar_residual(const Metric& metric, const RotationField& field,
                                 std::span<const double> x,
                                 std::span<const double> y);

struct TensorResidual {
  /// Left-hand side of the tensor Killing equation, entrywise.
  Matrix raw;
  /// max_ij |raw_ij| / max_ij (sum of |terms| of entry ij).
  double relative = 0.0;
};

/// (dg_ij/dx^p) X^p + g_pj dX^p/dx^i + g_ip dX^p/dx^j + 2 C_ijp (dX^p/dx^k) y^k.
TensorResidual killing_tensor_residual(const Metric& metric,
                                       const RotationField& field,
                                       std::span<const double> x,
                                       std::span<const double> y);

struct SamplePoint {
  std::vector<double> x;
  std::vector<double> y;
};

struct SymmetryVerdict {
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int fields_tested = 0;
  int worst_field_i = -1;
  int worst_field_j = -1;
  std::size_t worst_sample = 0;
  /// "consistent with spherical symmetry" or "not spherically symmetric".
  /// The Killing equations are necessary conditions only, so a pass is never
  /// reported as a proof.
  std::string verdict;
};

inline constexpr double kSymmetryTolerance = 1e-9;

/// Worst relative scalar Killing residual over every rotation generator and
/// sample. Samples are visited in order and ties keep the earliest point.
SymmetryVerdict symmetry_verdict(const Metric& metric,
                                 const std::vector<SamplePoint>& samples,
                                 double tolerance = kSymmetryTolerance);

}  // namespace finslerkit

#endif  // FINSLERKIT_SYMMETRY_HPP
