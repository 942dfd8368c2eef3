#ifndef FINSLERKIT_SAMPLING_HPP
#define FINSLERKIT_SAMPLING_HPP

#include <cstdint>
#include <vector>

#include "finslerkit/symmetry.hpp"

namespace finslerkit {

/// SplitMix64 stream; uniforms are (z >> 11) * 2^-53 in [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct SampleSpec {
  int n = 2;
  int count = 500;
  std::uint64_t seed = 0;
  double r_min = 0.05;
  double r_max = 0.95;
  double u_min = 0.1;
  double u_max = 2.0;

  /// Default ranges for a metric with the given domain radius:
  /// r in [0.05, min(0.95 R, 2)], u in [0.1, 2].
  static SampleSpec for_domain(int n, int count, std::uint64_t seed,
                               double domain_radius);
  /// Throws ConfigError unless 2 <= n <= 4, count >= 1 and the ranges are
  /// nonempty and inside the bounds above.
  void validate(double domain_radius) const;
};

/// Unit vector by rejection on the cube [-1, 1]^n: draw n uniforms w_k =
/// 2U - 1 in axis order, accept when 1e-12 < |w|^2 <= 1, return w / |w|.
std::vector<double> random_unit_vector(SplitMix64& rng, int n);

/// Deterministic samples. For each sample, draws happen in this order:
/// r = r_min + (r_max - r_min) U, the x direction, u = u_min + (u_max -
/// u_min) U, the y direction; x = r * dir_x, y = u * dir_y.
std::vector<SamplePoint> sample_domain(const SampleSpec& spec);

}  // namespace finslerkit

#endif  // FINSLERKIT_SAMPLING_HPP
