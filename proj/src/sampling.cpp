#include "finslerkit/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "finslerkit/errors.hpp"

namespace finslerkit {

SampleSpec SampleSpec::for_domain(int n, int count, std::uint64_t seed,
                                  double domain_radius) {
  SampleSpec spec;
  spec.n = n;
  spec.count = count;
  spec.seed = seed;
  spec.r_max = std::min(0.95 * domain_radius, 2.0);
  return spec;
}

void SampleSpec::validate(double domain_radius) const {
  if (n < 2 || n > 4) throw ConfigError("sampling: dimension must be 2, 3 or 4");
  if (count < 1) throw ConfigError("sampling: count must be at least 1");
  const double r_cap = std::min(0.95 * domain_radius, 2.0);
  if (!(r_min >= 0.05 && r_min <= r_max && r_max <= r_cap)) {
    throw ConfigError("sampling: r range must lie in [0.05, min(0.95 R, 2)]");
  }
  if (!(u_min >= 0.1 && u_min <= u_max && u_max <= 2.0)) {
    throw ConfigError("sampling: u range must lie in [0.1, 2]");
  }
}

std::vector<double> random_unit_vector(SplitMix64& rng, int n) {
  std::vector<double> w(n);
  for (;;) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      w[k] = 2.0 * rng.uniform() - 1.0;
      s += w[k] * w[k];
    }
    if (s > 1e-12 && s <= 1.0) {
      const double inv = 1.0 / std::sqrt(s);
      for (double& t : w) t *= inv;
      return w;
    }
  }
}

std::vector<SamplePoint> sample_domain(const SampleSpec& spec) {
  if (spec.count < 1) throw ConfigError("sampling: count must be at least 1");
  SplitMix64 rng(spec.seed);
  std::vector<SamplePoint> out;
  out.reserve(spec.count);
  for (int s = 0; s < spec.count; ++s) {
    SamplePoint p;
    const double r = spec.r_min + (spec.r_max - spec.r_min) * rng.uniform();
    p.x = random_unit_vector(rng, spec.n);
    for (double& t : p.x) t *= r;
    const double u = spec.u_min + (spec.u_max - spec.u_min) * rng.uniform();
    p.y = random_unit_vector(rng, spec.n);
    for (double& t : p.y) t *= u;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace finslerkit
