#include "finslerkit/jet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "finslerkit/errors.hpp"

namespace finslerkit {

namespace {

int tri(int b) { return b * (b + 1) / 2; }
int tet(int c) { return c * (c + 1) * (c + 2) / 6; }

void require_compatible(const Jet& a, const Jet& b, const char* op) {
  if (a.nvars() != b.nvars() || a.order() != b.order()) {
    std::ostringstream msg;
    msg << "jet " << op << ": operands differ in shape (m=" << a.nvars()
        << ", order=" << a.order() << " vs m=" << b.nvars()
        << ", order=" << b.order() << ")";
    throw std::invalid_argument(msg.str());
  }
}

Jet checked(Jet result, const char* what, double argument) {
  if (!result.all_finite()) {
    std::ostringstream msg;
    msg << what << ": non-finite result at argument " << argument;
    throw DomainError(msg.str(), argument);
  }
  return result;
}

[[noreturn]] void domain_fail(const char* fn, double argument) {
  std::ostringstream msg;
  msg.precision(17);
  msg << fn << ": argument " << argument << " outside domain";
  throw DomainError(msg.str(), argument);
}

}  // namespace

int Jet::coefficient_count(int nvars, int order) {
  int count = 1;
  if (order >= 1) count += nvars;
  if (order >= 2) count += tri(nvars);
  if (order >= 3) count += tet(nvars);
  return count;
}

Jet::Jet(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 0 || order < 0 || order > kMaxJetOrder) {
    throw std::invalid_argument("jet: nvars must be >= 0 and order in 0..3");
  }
  c_.assign(coefficient_count(nvars, order), 0.0);
}

Jet Jet::constant(double value, int nvars, int order) {
  Jet j(nvars, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int index, double value, int nvars, int order) {
  if (index < 0 || index >= nvars) {
    throw std::out_of_range("jet: variable index " + std::to_string(index) +
                            " not in [0, " + std::to_string(nvars) + ")");
  }
  Jet j(nvars, order);
  j.c_[0] = value;
  if (order >= 1) j.c_[j.offset_of(index)] = 1.0;
  return j;
}

int Jet::offset_of(int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  return 1 + nvars_ + tri(j) + i;
}

int Jet::offset_of(int i, int j, int k) const noexcept {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
  return 1 + nvars_ + tri(nvars_) + tet(k) + tri(j) + i;
}

double Jet::d(int i) const { return order_ >= 1 ? c_[offset_of(i)] : 0.0; }

double Jet::d(int i, int j) const {
  return order_ >= 2 ? c_[offset_of(i, j)] : 0.0;
}

double Jet::d(int i, int j, int k) const {
  return order_ >= 3 ? c_[offset_of(i, j, k)] : 0.0;
}

void Jet::set_d(int i, double value) {
  if (order_ < 1) throw std::logic_error("jet: order too low for set_d");
  c_[offset_of(i)] = value;
}

void Jet::set_d(int i, int j, double value) {
  if (order_ < 2) throw std::logic_error("jet: order too low for set_d");
  c_[offset_of(i, j)] = value;
}

void Jet::set_d(int i, int j, int k, double value) {
  if (order_ < 3) throw std::logic_error("jet: order too low for set_d");
  c_[offset_of(i, j, k)] = value;
}

Jet Jet::partial(int i) const {
  if (order_ < 1) throw std::logic_error("jet: cannot take partial of order 0");
  if (i < 0 || i >= nvars_) throw std::out_of_range("jet: partial index");
  Jet out(nvars_, order_ - 1);
  out.c_[0] = d(i);
  for (int j = 0; j < nvars_ && out.order_ >= 1; ++j) {
    out.c_[out.offset_of(j)] = d(i, j);
  }
  if (out.order_ >= 2) {
    for (int k = 0; k < nvars_; ++k)
      for (int j = 0; j <= k; ++j) out.c_[out.offset_of(j, k)] = d(i, j, k);
  }
  return out;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw std::invalid_argument("jet: cannot raise order");
  Jet out(nvars_, order);
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

bool Jet::all_finite() const noexcept {
  return std::all_of(c_.begin(), c_.end(),
                     [](double x) { return std::isfinite(x); });
}

Jet& Jet::operator+=(const Jet& other) {
  require_compatible(*this, other, "+");
  for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += other.c_[n];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_compatible(*this, other, "-");
  for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= other.c_[n];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet out = a;
  out += b;
  return checked(std::move(out), "add", a.value());
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet out = a;
  out -= b;
  return checked(std::move(out), "subtract", a.value());
}

Jet operator-(const Jet& a) {
  Jet out = a;
  out *= -1.0;
  return out;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_compatible(a, b, "*");
  const int m = a.nvars_;
  const int order = a.order_;
  Jet out(m, order);
  const double a0 = a.c_[0];
  const double b0 = b.c_[0];
  out.c_[0] = a0 * b0;
  if (order >= 1) {
    for (int i = 0; i < m; ++i) out.c_[1 + i] = a.c_[1 + i] * b0 + a0 * b.c_[1 + i];
  }
  if (order >= 2) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int ij = out.offset_of(i, j);
        out.c_[ij] = a.c_[ij] * b0 + a0 * b.c_[ij] + a.d(i) * b.d(j) +
                     a.d(j) * b.d(i);
      }
    }
  }
  if (order >= 3) {
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
          const int ijk = out.offset_of(i, j, k);
          out.c_[ijk] = a.c_[ijk] * b0 + a0 * b.c_[ijk] +
                        a.d(i, j) * b.d(k) + a.d(i, k) * b.d(j) +
                        a.d(j, k) * b.d(i) + a.d(i) * b.d(j, k) +
                        a.d(j) * b.d(i, k) + a.d(k) * b.d(i, j);
        }
      }
    }
  }
  return checked(std::move(out), "multiply", a0);
}

Jet compose(const Jet& inner, double h0, double h1, double h2, double h3) {
  const int m = inner.nvars_;
  const int order = inner.order_;
  Jet out(m, order);
  out.c_[0] = h0;
  if (order >= 1) {
    for (int i = 0; i < m; ++i) out.c_[1 + i] = h1 * inner.c_[1 + i];
  }
  if (order >= 2) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int ij = out.offset_of(i, j);
        out.c_[ij] = h1 * inner.c_[ij] + h2 * inner.d(i) * inner.d(j);
      }
    }
  }
  if (order >= 3) {
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
          const int ijk = out.offset_of(i, j, k);
          out.c_[ijk] = h1 * inner.c_[ijk] +
                        h2 * (inner.d(i, j) * inner.d(k) +
                              inner.d(i, k) * inner.d(j) +
                              inner.d(j, k) * inner.d(i)) +
                        h3 * inner.d(i) * inner.d(j) * inner.d(k);
        }
      }
    }
  }
  return out;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
  const int p = outer.nvars_;
  if (static_cast<int>(inner.size()) != p) {
    throw std::invalid_argument("jet compose: inner count must equal outer nvars");
  }
  if (p == 0) throw std::invalid_argument("jet compose: no inner jets");
  const int m = inner[0].nvars_;
  const int order = inner[0].order_;
  for (const Jet& z : inner) require_compatible(inner[0], z, "compose");
  if (outer.order_ < order) {
    throw std::invalid_argument("jet compose: outer order below inner order");
  }

  Jet out(m, order);
  out.c_[0] = outer.c_[0];
  if (order >= 1) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int a = 0; a < p; ++a) s += outer.d(a) * inner[a].d(i);
      out.c_[1 + i] = s;
    }
  }
  if (order >= 2) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i <= j; ++i) {
        double s = 0.0;
        for (int a = 0; a < p; ++a) {
          s += outer.d(a) * inner[a].d(i, j);
          for (int b = 0; b < p; ++b) {
            s += outer.d(a, b) * inner[a].d(i) * inner[b].d(j);
          }
        }
        out.c_[out.offset_of(i, j)] = s;
      }
    }
  }
  if (order >= 3) {
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
          double s = 0.0;
          for (int a = 0; a < p; ++a) {
            const Jet& za = inner[a];
            s += outer.d(a) * za.d(i, j, k);
            for (int b = 0; b < p; ++b) {
              const Jet& zb = inner[b];
              s += outer.d(a, b) * (za.d(i, j) * zb.d(k) + za.d(i, k) * zb.d(j) +
                                    za.d(j, k) * zb.d(i));
              for (int c = 0; c < p; ++c) {
                s += outer.d(a, b, c) * za.d(i) * zb.d(j) * inner[c].d(k);
              }
            }
          }
          out.c_[out.offset_of(i, j, k)] = s;
        }
      }
    }
  }
  return checked(std::move(out), "compose", outer.c_[0]);
}

Jet operator/(const Jet& a, const Jet& b) {
  require_compatible(a, b, "/");
  const double x = b.value();
  if (std::abs(x) < kDivisionGuard || !std::isfinite(x)) domain_fail("divide", x);
  const double inv = 1.0 / x;
  Jet recip = compose(b, inv, -inv * inv, 2.0 * inv * inv * inv,
                      -6.0 * inv * inv * inv * inv);
  return checked(a * recip, "divide", x);
}

Jet operator+(const Jet& a, double b) {
  Jet out = a;
  out.set_value(a.value() + b);
  return checked(std::move(out), "add", a.value());
}
Jet operator+(double a, const Jet& b) { return b + a; }
Jet operator-(const Jet& a, double b) { return a + (-b); }
Jet operator-(double a, const Jet& b) { return (-b) + a; }

Jet operator*(const Jet& a, double b) {
  Jet out = a;
  out *= b;
  return checked(std::move(out), "multiply", a.value());
}
Jet operator*(double a, const Jet& b) { return b * a; }

Jet operator/(const Jet& a, double b) {
  if (std::abs(b) < kDivisionGuard || !std::isfinite(b)) domain_fail("divide", b);
  return a * (1.0 / b);
}

Jet operator/(double a, const Jet& b) {
  return Jet::constant(a, b.nvars(), b.order()) / b;
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) domain_fail("sqrt", x);
  const double s = std::sqrt(x);
  const double h1 = 0.5 / s;
  const double h2 = -0.5 * h1 / x;
  const double h3 = -1.5 * h2 / x;
  return checked(compose(a, s, h1, h2, h3), "sqrt", x);
}

Jet sin(const Jet& a) {
  const double x = a.value();
  if (!std::isfinite(x)) domain_fail("sin", x);
  const double s = std::sin(x);
  const double c = std::cos(x);
  return checked(compose(a, s, c, -s, -c), "sin", x);
}

Jet cos(const Jet& a) {
  const double x = a.value();
  if (!std::isfinite(x)) domain_fail("cos", x);
  const double s = std::sin(x);
  const double c = std::cos(x);
  return checked(compose(a, c, -s, -c, s), "cos", x);
}

Jet exp(const Jet& a) {
  const double x = a.value();
  const double e = std::exp(x);
  if (!std::isfinite(e)) domain_fail("exp", x);
  return checked(compose(a, e, e, e, e), "exp", x);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) domain_fail("log", x);
  const double inv = 1.0 / x;
  return checked(compose(a, std::log(x), inv, -inv * inv, 2.0 * inv * inv * inv),
                 "log", x);
}

Jet abs(const Jet& a) {
  const double x = a.value();
  if (x == 0.0 || !std::isfinite(x)) domain_fail("abs", x);
  return x > 0.0 ? a : -a;
}

Jet pow(const Jet& a, double exponent) {
  const double x = a.value();
  const bool integral = std::isfinite(exponent) && std::floor(exponent) == exponent;
  if (!std::isfinite(x) || !std::isfinite(exponent)) domain_fail("pow", x);
  if (x < 0.0 && !integral) domain_fail("pow", x);
  if (x == 0.0 && exponent < 0.0) domain_fail("pow", x);
  if (exponent == 0.0) return Jet::constant(1.0, a.nvars(), a.order());

  // Falling factorial powers; x^(e-k) is only needed when the coefficient
  // is nonzero, which keeps x = 0 with small integer exponents finite.
  const double e = exponent;
  auto term = [&](double coeff, double power) {
    return coeff == 0.0 ? 0.0 : coeff * std::pow(x, power);
  };
  const double h0 = std::pow(x, e);
  const double h1 = term(e, e - 1.0);
  const double h2 = term(e * (e - 1.0), e - 2.0);
  const double h3 = term(e * (e - 1.0) * (e - 2.0), e - 3.0);
  // Derivatives above the jet order are dropped: at x = 0 they may be
  // infinite even when the requested ones are not.
  const int order = a.order();
  return checked(compose(a, h0, order >= 1 ? h1 : 0.0, order >= 2 ? h2 : 0.0,
                         order >= 3 ? h3 : 0.0),
                 "pow", x);
}

}  // namespace finslerkit
