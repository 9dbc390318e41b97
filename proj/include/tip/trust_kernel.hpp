#ifndef TIP_TRUST_KERNEL_HPP_
#define TIP_TRUST_KERNEL_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace tip {

// The six-parameter vector theta = (alpha0, beta0, s, f, s_hat, f_hat) for
// one (human, robot) pair: prior experiences, unit direct experience gains,
// unit indirect experience gains. alpha0, beta0, s, f must be strictly
// positive; s_hat, f_hat >= 0 (both zero reproduces the direct-update-only
// baseline exactly).
struct TipParams {
  TipParams(double alpha0_in, double beta0_in, double s_in, double f_in,
            double s_hat_in, double f_hat_in);

  static TipParams from_array(const std::array<double, 6>& v);
  std::array<double, 6> to_array() const;

  double alpha0;
  double beta0;
  double s;
  double f;
  double s_hat;
  double f_hat;
};

enum class EventKind { Prior, Direct, Indirect };

// One observation/update record. Field presence is fixed by kind:
//   Prior    — reported_trust required, session 0 only
//   Direct   — perf_success, perf_failure; reported_trust optional
//   Indirect — trust_in_recommender, recommender_trust; reported optional
// Build through the factories; they reject mixed or missing fields.
struct TrustEvent {
  static TrustEvent prior(double reported_trust);
  static TrustEvent direct(int session, double perf_success,
                           double perf_failure,
                           std::optional<double> reported_trust = {});
  static TrustEvent indirect(int session, double trust_in_recommender,
                             double recommender_trust,
                             std::optional<double> reported_trust = {});

  EventKind kind;
  int session = 0;
  double perf_success = 0.0;        // Direct only
  double perf_failure = 0.0;        // Direct only
  double trust_in_recommender = 0.0;  // Indirect only: t_k^{x,y}
  double recommender_trust = 0.0;     // Indirect only: t_k^{y,A}
  std::optional<double> reported_trust;

 private:
  TrustEvent() : kind(EventKind::Prior) {}
};

// Ordered event sequence for one (human, robot) pair. The first event must
// be a Prior carrying the initial rating t0; session indices strictly
// increase.
struct Trajectory {
  std::string human_id;
  std::string robot_id;
  std::vector<TrustEvent> events;

  // Throws ValidationError naming the offending event on any schema
  // violation.
  void validate() const;

  // Number of events carrying a reported trust (= likelihood terms).
  int report_count() const;
};

// Cumulative experience pair defining the current Beta trust distribution,
// plus the trustor's most recent reported trust (absent before the prior
// rating is seen).
struct ExperienceState {
  double alpha;
  double beta;
  std::optional<double> last_reported_trust;
};

struct ReplayStep {
  int session;
  ExperienceState state;
  double expected_trust;
  std::optional<double> reported_trust;
};

// Direct experience update:
//   alpha' = alpha + s * perf_success
//   beta'  = beta  + f * perf_failure
ExperienceState direct_update(const ExperienceState& state,
                              const TipParams& params, double perf_success,
                              double perf_failure);

// Indirect experience propagation. With
// dt = recommender_trust - own_previous_trust:
//   dt >= 0: alpha' = alpha + s_hat * trust_in_recommender * dt
//   dt <  0: beta'  = beta  + f_hat * trust_in_recommender * (-dt)
// Exactly one side changes unless dt = 0.
ExperienceState indirect_update(const ExperienceState& state,
                                const TipParams& params,
                                double trust_in_recommender,
                                double recommender_trust,
                                double own_previous_trust);

// Applies each event in order starting from (alpha0, beta0): Prior sets
// last_reported_trust, Direct applies the direct update, Indirect applies
// the propagation update with own_previous_trust = the last reported trust
// before the event. Returns one step per event with the expected trust
// alpha/(alpha+beta) after the update.
std::vector<ReplayStep> replay(const Trajectory& trajectory,
                               const TipParams& params);

// Limit of the expected trust under infinitely repeated direct updates
// with constant measurements: s*p / (s*p + f*pbar). Requires p + pbar > 0.
double asymptotic_trust(const TipParams& params, double perf_success,
                        double perf_failure);

}  // namespace tip

#endif  // TIP_TRUST_KERNEL_HPP_
