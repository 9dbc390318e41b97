#include "tip/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tip/errors.hpp"
#include "tip/special_functions.hpp"

namespace tip {

namespace {

// One likelihood term: the experience state at a report, together with the
// columns of the (constant) Jacobian of (alpha_k, beta_k) with respect to
// theta. alpha_k = alpha0 + s*sum_p + s_hat*sum_ind_pos, and likewise for
// beta_k, so the sums below are the only data-dependent pieces.
struct ReportPoint {
  double alpha;
  double beta;
  double reported;
  double sum_p;        // d alpha_k / d s
  double sum_pbar;     // d beta_k  / d f
  double sum_ind_pos;  // d alpha_k / d s_hat
  double sum_ind_neg;  // d beta_k  / d f_hat
};

std::vector<ReportPoint> report_points(const Trajectory& trajectory,
                                       const TipParams& theta) {
  trajectory.validate();
  std::vector<ReportPoint> points;
  points.reserve(trajectory.events.size());
  double sum_p = 0.0, sum_pbar = 0.0, sum_ind_pos = 0.0, sum_ind_neg = 0.0;
  std::optional<double> last_report;
  for (const TrustEvent& e : trajectory.events) {
    switch (e.kind) {
      case EventKind::Prior:
        break;
      case EventKind::Direct:
        sum_p += e.perf_success;
        sum_pbar += e.perf_failure;
        break;
      case EventKind::Indirect: {
        double dt = e.recommender_trust - *last_report;
        if (dt >= 0.0) {
          sum_ind_pos += e.trust_in_recommender * dt;
        } else {
          sum_ind_neg += e.trust_in_recommender * (-dt);
        }
        break;
      }
    }
    if (e.reported_trust) {
      double alpha =
          theta.alpha0 + theta.s * sum_p + theta.s_hat * sum_ind_pos;
      double beta =
          theta.beta0 + theta.f * sum_pbar + theta.f_hat * sum_ind_neg;
      points.push_back(ReportPoint{alpha, beta, *e.reported_trust, sum_p,
                                   sum_pbar, sum_ind_pos, sum_ind_neg});
      last_report = e.reported_trust;
    }
  }
  if (points.empty()) {
    throw ValidationError("trajectory (" + trajectory.human_id + ", " +
                          trajectory.robot_id +
                          ") has no reported trust values to fit");
  }
  return points;
}

std::array<double, 6> floors(const FitConfig& config) {
  double e = config.parameter_floor;
  return {e, e, e, e, 0.0, 0.0};
}

std::array<double, 6> project(const std::array<double, 6>& v,
                              const std::array<double, 6>& lo) {
  std::array<double, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = std::max(v[i], lo[i]);
  return out;
}

// Gradient with components pointing outside the feasible box (at a floor,
// with a frozen mask) zeroed; its infinity norm is the stop criterion.
std::array<double, 6> projected_gradient(const std::array<double, 6>& g,
                                         const std::array<double, 6>& x,
                                         const std::array<double, 6>& lo,
                                         const FreeMask& free) {
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) {
    if (!free[i]) continue;
    if (x[i] <= lo[i] && g[i] < 0.0) continue;
    out[i] = g[i];
  }
  return out;
}

double inf_norm(const std::array<double, 6>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

TipParams default_initial_theta(const Trajectory& trajectory,
                                const FitConfig& config,
                                const FreeMask& free) {
  double t0 = *trajectory.events.front().reported_trust;
  double floor = config.parameter_floor;
  double alpha0 = std::max(2.0 * t0, floor);
  double beta0 = std::max(2.0 * (1.0 - t0), floor);
  return TipParams(alpha0, beta0, 1.0, 1.0, free[4] ? 1.0 : 0.0,
                   free[5] ? 1.0 : 0.0);
}

double mean_abs_error(const std::vector<SessionFit>& sessions) {
  double sum = 0.0;
  for (const SessionFit& s : sessions) sum += s.fit_error;
  return sessions.empty() ? 0.0 : sum / static_cast<double>(sessions.size());
}

}  // namespace

void FitConfig::validate() const {
  if (max_iterations < 1) {
    throw ValidationError("FitConfig.max_iterations must be positive");
  }
  if (!(gradient_tolerance > 0.0)) {
    throw ValidationError("FitConfig.gradient_tolerance must be positive");
  }
  if (!(parameter_floor > 0.0)) {
    throw ValidationError("FitConfig.parameter_floor must be positive");
  }
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) {
    throw ValidationError("FitConfig.line_search_shrink must be in (0,1)");
  }
  if (!(sufficient_increase > 0.0 && sufficient_increase <= 0.5)) {
    throw ValidationError("FitConfig.sufficient_increase must be in (0,0.5]");
  }
}

double log_likelihood(const Trajectory& trajectory, const TipParams& theta) {
  double h = 0.0;
  for (const ReportPoint& pt : report_points(trajectory, theta)) {
    h += beta_log_pdf(pt.reported, BetaParams(pt.alpha, pt.beta));
  }
  return h;
}

std::array<double, 6> gradient(const Trajectory& trajectory,
                               const TipParams& theta) {
  std::array<double, 6> g{};
  for (const ReportPoint& pt : report_points(trajectory, theta)) {
    double psi_sum = digamma(pt.alpha + pt.beta);
    double d_alpha = std::log(pt.reported) - digamma(pt.alpha) + psi_sum;
    double d_beta = std::log1p(-pt.reported) - digamma(pt.beta) + psi_sum;
    g[0] += d_alpha;
    g[1] += d_beta;
    g[2] += d_alpha * pt.sum_p;
    g[3] += d_beta * pt.sum_pbar;
    g[4] += d_alpha * pt.sum_ind_pos;
    g[5] += d_beta * pt.sum_ind_neg;
  }
  return g;
}

FitResult fit_masked(const Trajectory& trajectory, const FitConfig& config,
                     const FreeMask& free) {
  config.validate();
  trajectory.validate();

  TipParams theta0 = config.initial_theta
                         ? *config.initial_theta
                         : default_initial_theta(trajectory, config, free);
  std::array<double, 6> lo = floors(config);
  std::array<double, 6> x = theta0.to_array();
  for (int i = 0; i < 6; ++i) {
    if (free[i]) x[i] = std::max(x[i], lo[i]);
  }

  double h = log_likelihood(trajectory, TipParams::from_array(x));
  if (!std::isfinite(h)) {
    throw ValidationError(
        "log likelihood is not finite at the initial point; the data likely "
        "contains unclamped ratings at 0 or 1");
  }

  bool converged = false;
  int iterations = 0;
  double step = 1.0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    iterations = iter + 1;
    std::array<double, 6> g = gradient(trajectory, TipParams::from_array(x));
    std::array<double, 6> pg = projected_gradient(g, x, lo, free);
    if (inf_norm(pg) < config.gradient_tolerance) {
      converged = true;
      iterations = iter;
      break;
    }

    // Backtracking Armijo search along the projected arc. The step grows
    // again after an eager acceptance so it can track the local curvature.
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      std::array<double, 6> trial = x;
      for (int i = 0; i < 6; ++i) {
        if (free[i]) trial[i] = x[i] + step * g[i];
      }
      trial = project(trial, lo);
      for (int i = 0; i < 6; ++i) {
        if (!free[i]) trial[i] = x[i];
      }
      double directional = 0.0;
      for (int i = 0; i < 6; ++i) directional += g[i] * (trial[i] - x[i]);
      if (directional <= 0.0) {
        // Projection removed every ascent component; the projected
        // gradient norm above will terminate on the next pass.
        break;
      }
      double h_trial =
          log_likelihood(trajectory, TipParams::from_array(trial));
      if (std::isfinite(h_trial) &&
          h_trial >= h + config.sufficient_increase * directional) {
        x = trial;
        h = h_trial;
        accepted = true;
        break;
      }
      step *= config.line_search_shrink;
    }
    if (!accepted) {
      // No acceptable ascent step at any reachable length.
      break;
    }
    step = std::min(step / config.line_search_shrink, 1e12);
  }

  TipParams theta_star = TipParams::from_array(x);
  FitResult result{theta_star, h, session_fits(trajectory, theta_star),
                   0.0,        converged, iterations,
                   false};
  result.mean_fit_error = mean_abs_error(result.sessions);
  result.low_data = trajectory.report_count() < 2;
  return result;
}

std::vector<SessionFit> session_fits(const Trajectory& trajectory,
                                     const TipParams& theta) {
  std::vector<SessionFit> sessions;
  for (const ReplayStep& stepk : replay(trajectory, theta)) {
    if (stepk.reported_trust) {
      double err = std::fabs(stepk.expected_trust - *stepk.reported_trust);
      sessions.push_back(SessionFit{stepk.session, stepk.expected_trust,
                                    *stepk.reported_trust, err});
    }
  }
  return sessions;
}

FitResult fit(const Trajectory& trajectory, const FitConfig& config) {
  return fit_masked(trajectory, config,
                    FreeMask{true, true, true, true, true, true});
}

FitResult fit_direct_only(const Trajectory& trajectory,
                          const FitConfig& config) {
  FitConfig frozen = config;
  if (frozen.initial_theta) {
    TipParams t = *frozen.initial_theta;
    frozen.initial_theta = TipParams(t.alpha0, t.beta0, t.s, t.f, 0.0, 0.0);
  }
  return fit_masked(trajectory, frozen,
                    FreeMask{true, true, true, true, false, false});
}

double rmse(const std::vector<FitResult>& results) {
  if (results.empty()) {
    throw ValidationError("rmse requires at least one fit result");
  }
  double outer = 0.0;
  for (const FitResult& r : results) {
    if (r.sessions.empty()) {
      throw ValidationError("rmse requires fit results with sessions");
    }
    double inner = 0.0;
    for (const SessionFit& s : r.sessions) inner += s.fit_error * s.fit_error;
    outer += inner / static_cast<double>(r.sessions.size());
  }
  return std::sqrt(outer / static_cast<double>(results.size()));
}

}  // namespace tip
