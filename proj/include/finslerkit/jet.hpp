#ifndef FINSLERKIT_JET_HPP
#define FINSLERKIT_JET_HPP

#include <span>
#include <vector>

namespace finslerkit {

/// Divisors with magnitude below this threshold raise a DomainError.
inline constexpr double kDivisionGuard = 1e-300;

inline constexpr int kMaxJetOrder = 3;

/**
 * Truncated Taylor expansion of a scalar function of `nvars` variables.
 *
 * Holds the value and all partial derivatives up to `order` (at most 3).
 * Symmetric derivative tensors are stored once per sorted multi-index
 * i <= j <= k in a single packed coefficient vector:
 *
 *   [ value | grad (m) | hess (m(m+1)/2) | third (m(m+1)(m+2)/6) ]
 *
 * Packing is colexicographic, so the packed index of a multi-index does not
 * depend on m.
 */
class Jet {
 public:
  Jet() = default;
  /// Zero jet.
  Jet(int nvars, int order);

  static Jet constant(double value, int nvars, int order);
  /// Independent variable `index` seeded at `value`; throws
  /// std::out_of_range when index is not in [0, nvars).
  static Jet variable(int index, double value, int nvars, int order);

  int nvars() const noexcept { return nvars_; }
  int order() const noexcept { return order_; }

  double value() const noexcept { return c_[0]; }
  /// Partial derivatives; indices may be given in any order. Derivatives
  /// above the jet order read as zero.
  double d(int i) const;
  double d(int i, int j) const;
  double d(int i, int j, int k) const;

  void set_value(double value) noexcept { c_[0] = value; }
  void set_d(int i, double value);
  void set_d(int i, int j, double value);
  void set_d(int i, int j, int k, double value);

  /// Jet of the partial derivative with respect to variable i, one order
  /// lower. Requires order >= 1.
  Jet partial(int i) const;

  /// Same jet truncated to a lower order.
  Jet truncated(int order) const;

  std::span<const double> coefficients() const noexcept { return c_; }
  std::span<double> coefficients() noexcept { return c_; }

  bool all_finite() const noexcept;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s);

  static int coefficient_count(int nvars, int order);

 private:
  int offset_of(int i) const noexcept { return 1 + i; }
  int offset_of(int i, int j) const noexcept;
  int offset_of(int i, int j, int k) const noexcept;

  int nvars_ = 0;
  int order_ = 0;
  std::vector<double> c_ = std::vector<double>(1, 0.0);

  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet compose(const Jet& inner, double h0, double h1, double h2,
                     double h3);
  friend Jet compose(const Jet& outer, std::span<const Jet> inner);
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
/// Throws DomainError when |b.value()| < kDivisionGuard.
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);

Jet operator+(const Jet& a, double b);
Jet operator+(double a, const Jet& b);
Jet operator-(const Jet& a, double b);
Jet operator-(double a, const Jet& b);
Jet operator*(const Jet& a, double b);
Jet operator*(double a, const Jet& b);
Jet operator/(const Jet& a, double b);
Jet operator/(double a, const Jet& b);

/// Composition h(inner) of a univariate function given its derivatives
/// h0..h3 at inner.value() (Faa di Bruno through order 3).
Jet compose(const Jet& inner, double h0, double h1, double h2, double h3);

/// Composition outer(inner[0], ..., inner[p-1]) where `outer` is a jet in p
/// variables evaluated at the values of the inner jets. The result has the
/// variables and order of the inner jets; outer.order() must be at least
/// that order.
Jet compose(const Jet& outer, std::span<const Jet> inner);

Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet abs(const Jet& a);
/// a^exponent for a constant exponent. Negative bases are accepted only for
/// integer exponents.
Jet pow(const Jet& a, double exponent);

}  // namespace finslerkit

#endif  // FINSLERKIT_JET_HPP
