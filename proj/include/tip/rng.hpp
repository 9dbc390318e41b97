#ifndef TIP_RNG_HPP_
#define TIP_RNG_HPP_

#include <cstdint>
#include <random>

namespace tip {

// Deterministic random stream with a fixed cross-platform algorithm.
//
// The engine is std::mt19937_64, whose output sequence is pinned bit-exactly
// by the C++ standard. All distribution transforms are implemented here
// (std::*_distribution algorithms are implementation-defined and would make
// per-seed results differ between standard libraries):
//   uniform:  53-bit mantissa scaling of one engine word
//   normal:   Marsaglia polar method (second value discarded)
//   gamma:    Marsaglia-Tsang squeeze; shape < 1 boosted via G(a+1) * U^(1/a)
//   binomial: count of n Bernoulli(p) uniforms
//
// split(key) derives an independent stream from (seed, key) via SplitMix64,
// so sub-streams do not depend on how much of the parent was consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Uniform draw in [0, 1).
  double uniform();

  // Standard normal draw.
  double normal();

  // Gamma(shape, 1) draw, shape > 0.
  double gamma(double shape);

  // Log of a Gamma(shape, 1) draw; stable for very small shapes where the
  // draw itself would underflow to zero.
  double log_gamma_draw(double shape);

  // Number of successes in n Bernoulli(p) trials.
  int binomial(int n, double p);

  // Independent stream derived from this stream's seed and the given key.
  Rng split(std::uint64_t key) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t next_word();

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 mix function, used for stream derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tip

#endif  // TIP_RNG_HPP_
