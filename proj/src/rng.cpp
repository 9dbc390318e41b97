#include "tip/rng.hpp"

#include <cmath>

#include "tip/errors.hpp"

namespace tip {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::split(std::uint64_t key) const {
  return Rng(splitmix64(seed_ ^ splitmix64(key + 1)));
}

std::uint64_t Rng::next_word() { return engine_(); }

double Rng::uniform() {
  // 53 uniform mantissa bits; result in [0, 1).
  return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  for (;;) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma draw requires shape > 0");
  }
  if (shape < 1.0) {
    return std::exp(log_gamma_draw(shape));
  }
  // Marsaglia-Tsang (2000).
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma draw requires shape > 0");
  }
  if (shape >= 1.0) {
    return std::log(gamma(shape));
  }
  // G(a) = G(a+1) * U^(1/a); kept in log space so tiny shapes do not
  // underflow to zero.
  double u = uniform();
  while (u <= 0.0) u = uniform();
  return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
}

int Rng::binomial(int n, double p) {
  if (n < 0) throw DomainError("binomial draw requires n >= 0");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial draw requires p in [0,1]");
  }
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (uniform() < p) ++count;
  }
  return count;
}

}  // namespace tip
