#include "linenet/rng.hpp"

#include <cmath>
#include <random>

namespace linenet {

// Distribution objects are constructed per draw so no hidden cache carries
// state between draws; a stream's output sequence depends only on its key.
double Stream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw Error("poisson: invalid mean");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(*this);
}

Vec random_unit_vector(Stream& rng, int d) {
  Vec v(d);
  double n = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    n = v.norm();
  } while (n < 1e-300);
  return v / n;
}

Vec random_in_ball(Stream& rng, int k, double radius) {
  if (k == 0) return Vec(0);
  const Vec u = random_unit_vector(rng, k);
  const double r = radius * std::pow(rng.uniform_open_closed(), 1.0 / k);
  return r * u;
}

}  // namespace linenet
