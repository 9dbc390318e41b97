#include "tip/trust_kernel.hpp"

#include <cmath>
#include <string>

#include "tip/errors.hpp"

namespace tip {

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(name) + " must be in (0,1), got " +
                      std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be >= 0, got " +
                      std::to_string(v));
  }
}

}  // namespace

TipParams::TipParams(double alpha0_in, double beta0_in, double s_in,
                     double f_in, double s_hat_in, double f_hat_in)
    : alpha0(alpha0_in),
      beta0(beta0_in),
      s(s_in),
      f(f_in),
      s_hat(s_hat_in),
      f_hat(f_hat_in) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("TipParams.") + name +
                        " must be > 0, got " + std::to_string(v));
    }
  };
  require_positive(alpha0, "alpha0");
  require_positive(beta0, "beta0");
  require_positive(s, "s");
  require_positive(f, "f");
  require_nonnegative(s_hat, "TipParams.s_hat");
  require_nonnegative(f_hat, "TipParams.f_hat");
}

TipParams TipParams::from_array(const std::array<double, 6>& v) {
  return TipParams(v[0], v[1], v[2], v[3], v[4], v[5]);
}

std::array<double, 6> TipParams::to_array() const {
  return {alpha0, beta0, s, f, s_hat, f_hat};
}

TrustEvent TrustEvent::prior(double reported_trust) {
  require_unit_interval(reported_trust, "prior reported_trust");
  TrustEvent e;
  e.kind = EventKind::Prior;
  e.session = 0;
  e.reported_trust = reported_trust;
  return e;
}

TrustEvent TrustEvent::direct(int session, double perf_success,
                              double perf_failure,
                              std::optional<double> reported_trust) {
  require_nonnegative(perf_success, "perf_success");
  require_nonnegative(perf_failure, "perf_failure");
  if (reported_trust) {
    require_unit_interval(*reported_trust, "reported_trust");
  }
  TrustEvent e;
  e.kind = EventKind::Direct;
  e.session = session;
  e.perf_success = perf_success;
  e.perf_failure = perf_failure;
  e.reported_trust = reported_trust;
  return e;
}

TrustEvent TrustEvent::indirect(int session, double trust_in_recommender,
                                double recommender_trust,
                                std::optional<double> reported_trust) {
  require_unit_interval(trust_in_recommender, "trust_in_recommender");
  require_unit_interval(recommender_trust, "recommender_trust");
  if (reported_trust) {
    require_unit_interval(*reported_trust, "reported_trust");
  }
  TrustEvent e;
  e.kind = EventKind::Indirect;
  e.session = session;
  e.trust_in_recommender = trust_in_recommender;
  e.recommender_trust = recommender_trust;
  e.reported_trust = reported_trust;
  return e;
}

void Trajectory::validate() const {
  auto fail = [this](size_t index, const std::string& msg) {
    throw ValidationError("trajectory (" + human_id + ", " + robot_id +
                          "), event " + std::to_string(index) + ": " + msg);
  };
  if (events.empty()) {
    throw ValidationError("trajectory (" + human_id + ", " + robot_id +
                          ") has no events");
  }
  if (events.front().kind != EventKind::Prior) {
    fail(0, "first event must be the prior rating");
  }
  if (!events.front().reported_trust) {
    fail(0, "prior event must carry a reported trust");
  }
  int last_session = -1;
  for (size_t i = 0; i < events.size(); ++i) {
    const TrustEvent& e = events[i];
    if (e.kind == EventKind::Prior) {
      if (i != 0) fail(i, "duplicate prior event");
      if (e.session != 0) fail(i, "prior event must be at session 0");
    }
    if (e.session <= last_session) {
      fail(i, "session indices must strictly increase (" +
                  std::to_string(e.session) + " after " +
                  std::to_string(last_session) + ")");
    }
    last_session = e.session;
  }
}

int Trajectory::report_count() const {
  int n = 0;
  for (const TrustEvent& e : events) {
    if (e.reported_trust) ++n;
  }
  return n;
}

ExperienceState direct_update(const ExperienceState& state,
                              const TipParams& params, double perf_success,
                              double perf_failure) {
  require_nonnegative(perf_success, "perf_success");
  require_nonnegative(perf_failure, "perf_failure");
  ExperienceState next = state;
  next.alpha = state.alpha + params.s * perf_success;
  next.beta = state.beta + params.f * perf_failure;
  return next;
}

ExperienceState indirect_update(const ExperienceState& state,
                                const TipParams& params,
                                double trust_in_recommender,
                                double recommender_trust,
                                double own_previous_trust) {
  require_unit_interval(trust_in_recommender, "trust_in_recommender");
  require_unit_interval(recommender_trust, "recommender_trust");
  require_unit_interval(own_previous_trust, "own_previous_trust");
  double dt = recommender_trust - own_previous_trust;
  ExperienceState next = state;
  if (dt >= 0.0) {
    next.alpha = state.alpha + params.s_hat * trust_in_recommender * dt;
  } else {
    next.beta = state.beta + params.f_hat * trust_in_recommender * (-dt);
  }
  return next;
}

std::vector<ReplayStep> replay(const Trajectory& trajectory,
                               const TipParams& params) {
  trajectory.validate();
  std::vector<ReplayStep> steps;
  steps.reserve(trajectory.events.size());
  ExperienceState state{params.alpha0, params.beta0, std::nullopt};
  for (const TrustEvent& e : trajectory.events) {
    switch (e.kind) {
      case EventKind::Prior:
        break;
      case EventKind::Direct:
        state = direct_update(state, params, e.perf_success, e.perf_failure);
        break;
      case EventKind::Indirect:
        state = indirect_update(state, params, e.trust_in_recommender,
                                e.recommender_trust,
                                *state.last_reported_trust);
        break;
    }
    if (e.reported_trust) {
      state.last_reported_trust = e.reported_trust;
    }
    steps.push_back(ReplayStep{e.session, state,
                               state.alpha / (state.alpha + state.beta),
                               e.reported_trust});
  }
  return steps;
}

double asymptotic_trust(const TipParams& params, double perf_success,
                        double perf_failure) {
  require_nonnegative(perf_success, "perf_success");
  require_nonnegative(perf_failure, "perf_failure");
  if (perf_success + perf_failure <= 0.0) {
    throw DomainError("asymptotic_trust requires perf_success + perf_failure > 0");
  }
  double sp = params.s * perf_success;
  double fp = params.f * perf_failure;
  return sp / (sp + fp);
}

}  // namespace tip
