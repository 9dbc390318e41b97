#ifndef TIP_INFERENCE_HPP_
#define TIP_INFERENCE_HPP_

#include <array>
#include <optional>
#include <vector>

#include "tip/trust_kernel.hpp"

namespace tip {

// Optimizer settings for the maximum-likelihood fit. Defaults follow a
// standard projected gradient ascent with Armijo backtracking on the
// concave objective: the optimum does not depend on the starting point,
// only the iteration count does.
struct FitConfig {
  int max_iterations = 5000;
  // Stop when the infinity norm of the projected gradient drops below this.
  double gradient_tolerance = 1e-6;
  // Lower bound keeping alpha0, beta0, s, f >= floor and s_hat, f_hat >= 0.
  double parameter_floor = 1e-4;
  // Starting point; when absent, alpha0/beta0 are moment-matched to the
  // prior rating with pseudo-count 2 and the gains start at 1.
  std::optional<TipParams> initial_theta;
  double line_search_shrink = 0.5;
  double sufficient_increase = 1e-4;

  void validate() const;
};

// Expected trust, report, and fit error at one session carrying a report.
struct SessionFit {
  int session;
  double expected_trust;
  double reported_trust;
  double fit_error;  // |expected - reported|
};

struct FitResult {
  TipParams theta_star;
  double log_likelihood;
  std::vector<SessionFit> sessions;
  double mean_fit_error;
  bool converged;
  int iterations;
  // Fewer than 2 reports: s_hat/f_hat (and possibly s/f) are
  // unidentifiable; the fit still runs, the caller decides.
  bool low_data;
};

// Which of (alpha0, beta0, s, f, s_hat, f_hat) the optimizer may move.
using FreeMask = std::array<bool, 6>;

// Log likelihood H(theta): sum of the Beta log density of every reported
// trust against the replayed experience state at that event. The prior
// rating is scored against Beta(alpha0, beta0).
double log_likelihood(const Trajectory& trajectory, const TipParams& theta);

// Analytic gradient of H. Per report: d/dalpha log pdf =
// ln t - psi(alpha) + psi(alpha+beta) (and symmetrically for beta), chained
// through the constant Jacobian of the cumulative-experience sums.
// Components order matches TipParams::to_array.
std::array<double, 6> gradient(const Trajectory& trajectory,
                               const TipParams& theta);

// Projected gradient ascent with backtracking line search; H is
// nondecreasing across accepted iterates. Frozen components stay exactly
// at their initial value.
FitResult fit_masked(const Trajectory& trajectory, const FitConfig& config,
                     const FreeMask& free);

// All six parameters free.
FitResult fit(const Trajectory& trajectory, const FitConfig& config = {});

// s_hat and f_hat frozen at zero (the direct-update-only baseline).
FitResult fit_direct_only(const Trajectory& trajectory,
                          const FitConfig& config = {});

// Expected trust and fit error at every report under the given parameters
// (the per-session e_k metric, without fitting).
std::vector<SessionFit> session_fits(const Trajectory& trajectory,
                                     const TipParams& theta);

// Root-mean-square error over fit results for one robot:
//   sqrt( (1/N) sum_i (1/(K_i+1)) sum_k e_k^2 )
double rmse(const std::vector<FitResult>& results);

}  // namespace tip

#endif  // TIP_INFERENCE_HPP_
