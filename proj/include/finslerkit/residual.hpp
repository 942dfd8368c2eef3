#ifndef FINSLERKIT_RESIDUAL_HPP
#define FINSLERKIT_RESIDUAL_HPP

#include <cmath>
#include <initializer_list>

namespace finslerkit {

/// A residual as the signed sum of its terms together with the scale used
/// to make it relative: the sum of the absolute values of the terms.
struct Residual {
  double raw = 0.0;
  double scale = 0.0;

  void add(double term) {
    raw += term;
    scale += std::abs(term);
  }

  /// |raw| / scale, or 0 when every term vanishes.
  double relative() const { return scale > 0.0 ? std::abs(raw) / scale : 0.0; }
};

inline Residual residual_of(std::initializer_list<double> terms) {
  Residual r;
  for (double t : terms) r.add(t);
  return r;
}

inline double relative_residual(std::initializer_list<double> terms) {
  return residual_of(terms).relative();
}

}  // namespace finslerkit

#endif  // FINSLERKIT_RESIDUAL_HPP
