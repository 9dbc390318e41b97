#ifndef TIP_SPECIAL_FUNCTIONS_HPP_
#define TIP_SPECIAL_FUNCTIONS_HPP_

#include "tip/rng.hpp"

namespace tip {

// Parameters of a Beta distribution: cumulative positive and negative
// experience. Both must be strictly positive; construction throws
// DomainError otherwise (never clamps silently).
struct BetaParams {
  BetaParams(double alpha_in, double beta_in);

  double alpha;
  double beta;
};

// ln Gamma(x) for x > 0. Lanczos approximation (g = 7, 9 terms) with the
// reflection formula below x = 0.5; relative error <= 1e-12 on
// [1e-3, 1e6].
double log_gamma(double x);

// Digamma psi(x) for x > 0. Upward recurrence to x >= 10, then the
// asymptotic Bernoulli series; absolute error <= 1e-10 on [1e-3, 1e6].
double digamma(double x);

// Log density of Beta(alpha, beta) at t in (0, 1):
//   (alpha-1) ln t + (beta-1) ln(1-t) - ln B(alpha, beta)
double beta_log_pdf(double t, const BetaParams& p);

// Mean alpha / (alpha + beta).
double beta_mean(const BetaParams& p);

// Regularized incomplete beta I_t(alpha, beta) for t in [0, 1], via the
// Lentz continued fraction with the symmetry switch at
// t = (alpha+1)/(alpha+beta+2). Absolute error <= 1e-10.
double beta_cdf(double t, const BetaParams& p);

// Inverse of beta_cdf: returns t with |beta_cdf(t) - q| <= 1e-8, for
// q in (0, 1). Newton steps safeguarded by a maintained bisection bracket.
double beta_quantile(double q, const BetaParams& p);

// One draw from Beta(alpha, beta), via two Gamma draws combined in log
// space. Deterministic for a fixed rng state; always in (0, 1).
double beta_sample(const BetaParams& p, Rng& rng);

}  // namespace tip

#endif  // TIP_SPECIAL_FUNCTIONS_HPP_
