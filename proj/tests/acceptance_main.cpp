// Acceptance gate: ten numbered end-to-end checks with pinned tolerances,
// one PASS/FAIL line each, nonzero exit when anything fails. Check 10
// drives the installed command line binary, passed via --cli <path>.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tip/dataio.hpp"
#include "tip/errors.hpp"
#include "tip/inference.hpp"
#include "tip/rng.hpp"
#include "tip/simulator.hpp"
#include "tip/special_functions.hpp"
#include "tip/trust_kernel.hpp"

using tip::EventKind;
using tip::ExperienceState;
using tip::ExperimentConfig;
using tip::FitConfig;
using tip::FitResult;
using tip::NoiseModel;
using tip::Rng;
using tip::TipParams;
using tip::Trajectory;
using tip::TrustEvent;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (detail.empty()) detail = why;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

Trajectory random_trajectory(Rng& rng, int n_events, double report_rate) {
  Trajectory traj;
  traj.human_id = "h";
  traj.robot_id = "r";
  traj.events.push_back(TrustEvent::prior(0.05 + 0.9 * rng.uniform()));
  for (int session = 1; session <= n_events; ++session) {
    std::optional<double> report;
    if (rng.uniform() < report_rate) report = 0.05 + 0.9 * rng.uniform();
    if (rng.uniform() < 0.5) {
      double p = rng.uniform();
      traj.events.push_back(TrustEvent::direct(session, p, 1.0 - p, report));
    } else {
      traj.events.push_back(TrustEvent::indirect(
          session, 0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform(),
          report));
    }
  }
  return traj;
}

TipParams random_params(Rng& rng) {
  return TipParams(0.3 + 4.0 * rng.uniform(), 0.3 + 4.0 * rng.uniform(),
                   0.2 + 3.0 * rng.uniform(), 0.2 + 3.0 * rng.uniform(),
                   0.05 + 3.0 * rng.uniform(), 0.05 + 3.0 * rng.uniform());
}

// --- check 1: special functions ---------------------------------------

// Tanh-sinh quadrature of the Beta density with nodes and weights kept in
// log form, so endpoint singularities (shape < 1) are integrated without
// ever forming t in double precision.
double beta_density_integral(double alpha, double beta) {
  const double h = 1.0 / 128.0;
  const double u_max = 6.0;
  const double half_pi = 1.57079632679489661923;
  const double log_norm = tip::log_gamma(alpha) + tip::log_gamma(beta) -
                          tip::log_gamma(alpha + beta);
  auto log1p_exp = [](double v) {
    return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  };
  auto log_cosh = [](double v) {
    double a = std::fabs(v);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  };
  double sum = 0.0;
  for (double u = -u_max; u <= u_max + 1e-12; u += h) {
    double x = half_pi * std::sinh(u);
    double log_t = -log1p_exp(-2.0 * x);
    double log_1mt = -log1p_exp(2.0 * x);
    double log_w =
        std::log(half_pi) + log_cosh(u) - std::log(2.0) - 2.0 * log_cosh(x);
    sum += std::exp((alpha - 1.0) * log_t + (beta - 1.0) * log_1mt -
                    log_norm + log_w);
  }
  return sum * h;
}

Outcome check_special_functions() {
  Outcome out;

  Rng rng(101);
  for (int i = 0; i < 5000; ++i) {
    double x = std::pow(10.0, -3.0 + 9.0 * rng.uniform());
    double lhs = tip::log_gamma(x + 1.0);
    double rhs = tip::log_gamma(x) + std::log(x);
    double scale = std::max({1.0, std::fabs(lhs), std::fabs(std::log(x))});
    if (std::fabs(lhs - rhs) > 1e-12 * scale) {
      out.fail("log_gamma recurrence off at x=" + fmt(x));
      break;
    }
  }

  for (int i = 0; i < 500; ++i) {
    double x = std::pow(10.0, -2.0 + 6.0 * rng.uniform());
    double h = 1e-5 * std::max(1.0, x);
    double fd = (tip::log_gamma(x + h) - tip::log_gamma(x - h)) / (2.0 * h);
    double got = tip::digamma(x);
    if (std::fabs(got - fd) > 1e-6 * std::max(1.0, std::fabs(fd))) {
      out.fail("digamma vs finite difference off at x=" + fmt(x));
      break;
    }
  }

  const double pairs[][2] = {{1, 1},     {2, 3},    {0.5, 0.5}, {0.7, 2.3},
                             {5, 1},     {1, 5},    {8.5, 3.2}, {12, 17},
                             {0.1, 0.4}, {0.3, 9},  {2.5, 0.2}, {30, 4.5}};
  for (const auto& pr : pairs) {
    double integral = beta_density_integral(pr[0], pr[1]);
    if (std::fabs(integral - 1.0) > 1e-8) {
      out.fail("density integral " + fmt(integral) + " for (" + fmt(pr[0]) +
               "," + fmt(pr[1]) + ")");
    }
  }

  const double shapes[] = {0.4, 1.0, 2.0, 5.5, 17.0};
  for (double a : shapes) {
    for (double b : shapes) {
      tip::BetaParams p(a, b);
      for (double q = 0.01; q < 0.995; q += 0.03) {
        double t = tip::beta_quantile(q, p);
        if (std::fabs(tip::beta_cdf(t, p) - q) > 1e-7) {
          out.fail("quantile round trip off at q=" + fmt(q) + " (" + fmt(a) +
                   "," + fmt(b) + ")");
        }
      }
    }
  }
  return out;
}

// --- check 2: replay vs closed-form summation --------------------------

std::vector<ExperienceState> closed_form_states(const Trajectory& traj,
                                                const TipParams& theta) {
  std::vector<ExperienceState> states;
  double sum_p = 0.0, sum_pbar = 0.0, sum_pos = 0.0, sum_neg = 0.0;
  double last_report = 0.0;
  for (const TrustEvent& e : traj.events) {
    if (e.kind == EventKind::Direct) {
      sum_p += e.perf_success;
      sum_pbar += e.perf_failure;
    } else if (e.kind == EventKind::Indirect) {
      double gap = e.recommender_trust - last_report;
      if (gap >= 0.0) {
        sum_pos += e.trust_in_recommender * gap;
      } else {
        sum_neg += e.trust_in_recommender * (-gap);
      }
    }
    ExperienceState s;
    s.alpha = theta.alpha0 + theta.s * sum_p + theta.s_hat * sum_pos;
    s.beta = theta.beta0 + theta.f * sum_pbar + theta.f_hat * sum_neg;
    states.push_back(s);
    if (e.reported_trust) last_report = *e.reported_trust;
  }
  return states;
}

Outcome check_replay_equivalence() {
  Outcome out;
  Rng rng(202);
  for (int rep = 0; rep < 1000 && out.pass; ++rep) {
    Trajectory traj =
        random_trajectory(rng, 3 + static_cast<int>(rng.uniform() * 25), 0.7);
    TipParams theta = random_params(rng);
    auto steps = tip::replay(traj, theta);
    auto states = closed_form_states(traj, theta);
    for (size_t k = 0; k < steps.size(); ++k) {
      double da = std::fabs(steps[k].state.alpha - states[k].alpha);
      double db = std::fabs(steps[k].state.beta - states[k].beta);
      if (da > 1e-12 * std::max(1.0, states[k].alpha) ||
          db > 1e-12 * std::max(1.0, states[k].beta)) {
        out.fail("replay/summation mismatch at event " + std::to_string(k) +
                 " of trajectory " + std::to_string(rep));
        break;
      }
    }
  }
  return out;
}

// --- check 3: gradient vs finite differences ---------------------------

Outcome check_gradient() {
  Outcome out;
  Rng rng(303);
  for (int rep = 0; rep < 100 && out.pass; ++rep) {
    Trajectory traj =
        random_trajectory(rng, 4 + static_cast<int>(rng.uniform() * 16), 0.8);
    TipParams theta = random_params(rng);
    auto g = tip::gradient(traj, theta);
    auto x = theta.to_array();
    for (int i = 0; i < 6; ++i) {
      double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
      auto lo = x, hi = x;
      lo[i] -= h;
      hi[i] += h;
      double fd = (tip::log_likelihood(traj, TipParams::from_array(hi)) -
                   tip::log_likelihood(traj, TipParams::from_array(lo))) /
                  (2.0 * h);
      double scale = std::max({1.0, std::fabs(g[i]), std::fabs(fd)});
      if (std::fabs(g[i] - fd) > 1e-5 * scale) {
        out.fail("component " + std::to_string(i) + " of pair " +
                 std::to_string(rep) + ": analytic " + fmt(g[i]) + " vs fd " +
                 fmt(fd));
        break;
      }
    }
  }
  return out;
}

// --- check 4: concavity -------------------------------------------------

Outcome check_concavity() {
  Outcome out;
  Rng rng(404);
  for (int rep = 0; rep < 100; ++rep) {
    Trajectory traj =
        random_trajectory(rng, 4 + static_cast<int>(rng.uniform() * 12), 0.8);
    auto xa = random_params(rng).to_array();
    auto xb = random_params(rng).to_array();
    std::array<double, 6> xm;
    for (int i = 0; i < 6; ++i) xm[i] = 0.5 * (xa[i] + xb[i]);
    double hm = tip::log_likelihood(traj, TipParams::from_array(xm));
    double ha = tip::log_likelihood(traj, TipParams::from_array(xa));
    double hb = tip::log_likelihood(traj, TipParams::from_array(xb));
    if (hm < 0.5 * (ha + hb) - 1e-9) {
      out.fail("chord " + std::to_string(rep) + ": midpoint " + fmt(hm) +
               " below average " + fmt(0.5 * (ha + hb)));
      break;
    }
  }
  return out;
}

// --- check 5: grid-search oracle for a restricted fit -------------------

// Exhaustive search of H over (alpha0, beta0) in [0.1, 20]^2, step 0.01,
// with the gains fixed at (s, f, s_hat, f_hat) = (1, 1, 0, 0). H separates
// into one array per axis plus one in alpha0+beta0, so the full grid is
// three 1-D precomputations and an additive scan.
struct GridResult {
  double alpha0;
  double beta0;
  bool interior;
};

GridResult grid_search(const Trajectory& traj) {
  const double lo = 0.1, step = 0.01;
  const int n = 1991;  // 0.1 .. 20.0

  // Cumulative direct sums at each report (gains fixed: alpha offset is
  // the success sum, beta offset the failure sum).
  std::vector<double> c, d, log_t, log_1mt;
  {
    double sum_p = 0.0, sum_pbar = 0.0;
    for (const TrustEvent& e : traj.events) {
      if (e.kind == EventKind::Direct) {
        sum_p += e.perf_success;
        sum_pbar += e.perf_failure;
      }
      if (e.reported_trust) {
        c.push_back(sum_p);
        d.push_back(sum_pbar);
        log_t.push_back(std::log(*e.reported_trust));
        log_1mt.push_back(std::log(1.0 - *e.reported_trust));
      }
    }
  }
  const size_t n_reports = c.size();

  std::vector<double> fa(n), gb(n), x_sum(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    double a = lo + step * i;
    double b = lo + step * i;
    double f_acc = 0.0, g_acc = 0.0;
    for (size_t k = 0; k < n_reports; ++k) {
      f_acc += (a + c[k] - 1.0) * log_t[k] - tip::log_gamma(a + c[k]);
      g_acc += (b + d[k] - 1.0) * log_1mt[k] - tip::log_gamma(b + d[k]);
    }
    fa[i] = f_acc;
    gb[i] = g_acc;
  }
  for (int m = 0; m < 2 * n - 1; ++m) {
    double u = 2.0 * lo + step * m;
    double acc = 0.0;
    for (size_t k = 0; k < n_reports; ++k) {
      acc += tip::log_gamma(u + c[k] + d[k]);
    }
    x_sum[m] = acc;
  }

  int best_i = 0, best_j = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double h = fa[i] + gb[j] + x_sum[i + j];
      if (h > best) {
        best = h;
        best_i = i;
        best_j = j;
      }
    }
  }
  bool interior = best_i > 0 && best_i < n - 1 && best_j > 0 && best_j < n - 1;
  return GridResult{lo + step * best_i, lo + step * best_j, interior};
}

Outcome check_grid_oracle() {
  Outcome out;
  std::vector<Trajectory> trajectories;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ExperimentConfig cfg;
    cfg.n_sessions = 6;
    cfg.seed = seed;
    for (Trajectory& t : tip::generate_synthetic(cfg, NoiseModel::BetaSampled)) {
      trajectories.push_back(std::move(t));
      if (trajectories.size() == 10) break;
    }
    if (trajectories.size() == 10) break;
  }

  // The likelihood surface has a diagonal ridge in (alpha0, beta0), so the
  // lattice argmax can land one cell away from the continuum optimum along
  // the ridge. Coordinates must agree to 1.5 grid steps; the sharp check is
  // that the optimizer's likelihood dominates the exhaustive maximum.
  double max_dev = 0.0;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    GridResult grid = grid_search(trajectories[i]);
    if (!grid.interior) {
      out.fail("grid argmax at the search boundary for trajectory " +
               std::to_string(i));
      continue;
    }
    FitConfig config;
    config.max_iterations = 20000;
    config.gradient_tolerance = 1e-8;
    config.initial_theta = TipParams(1, 1, 1, 1, 0, 0);
    FitResult fitted = tip::fit_masked(
        trajectories[i], config,
        tip::FreeMask{true, true, false, false, false, false});

    double da = std::fabs(fitted.theta_star.alpha0 - grid.alpha0);
    double db = std::fabs(fitted.theta_star.beta0 - grid.beta0);
    max_dev = std::max({max_dev, da, db});
    out.require(da <= 0.015 + 1e-9 && db <= 0.015 + 1e-9,
                "trajectory " + std::to_string(i) + ": optimizer (" +
                    fmt(fitted.theta_star.alpha0) + "," +
                    fmt(fitted.theta_star.beta0) + ") vs grid (" +
                    fmt(grid.alpha0) + "," + fmt(grid.beta0) + ")");

    TipParams grid_theta(grid.alpha0, grid.beta0, 1, 1, 0, 0);
    double h_grid = tip::log_likelihood(trajectories[i], grid_theta);
    out.require(fitted.log_likelihood >= h_grid - 1e-9,
                "trajectory " + std::to_string(i) +
                    ": optimizer likelihood below the grid maximum");
  }
  if (out.pass) out.detail = "max coordinate deviation " + fmt(max_dev);
  return out;
}

// --- check 6: parameter/trajectory recovery ----------------------------

double mu_curve_rmse(const Trajectory& traj, const TipParams& fitted,
                     const TipParams& truth) {
  auto fit_steps = tip::replay(traj, fitted);
  auto true_steps = tip::replay(traj, truth);
  double ss = 0.0;
  int count = 0;
  for (size_t k = 0; k < fit_steps.size(); ++k) {
    if (!fit_steps[k].reported_trust) continue;
    double diff = fit_steps[k].expected_trust - true_steps[k].expected_trust;
    ss += diff * diff;
    ++count;
  }
  return std::sqrt(ss / count);
}

Outcome check_recovery() {
  Outcome out;

  // Noise-free reports: the fitted expected-trust curve must sit on the
  // generating one.
  {
    TipParams truth(2, 2, 1, 1, 1, 1);
    double ss = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ExperimentConfig cfg;
      cfg.seed = seed;
      for (const Trajectory& traj :
           tip::generate_synthetic(cfg, NoiseModel::ExpectedValue)) {
        FitResult r = tip::fit(traj);
        double rmse = mu_curve_rmse(traj, r.theta_star, truth);
        ss += rmse * rmse;
        ++count;
      }
    }
    double pooled = std::sqrt(ss / count);
    out.require(pooled <= 0.01, "noise-free recovery rmse " + fmt(pooled));
  }

  // Sampled reports at the 15-session protocol scale, averaged over seeds.
  // Generating parameters carry prior mass 20, the regime where repeated
  // ratings are consistent enough (sampling sd about 0.1) that a 16-report
  // fit can track the generating curve; prior mass 4 puts sampling noise
  // near 0.2 per report, unrecoverable at this data size by any estimator.
  {
    TipParams truth(10, 10, 1, 1, 1, 1);
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      ExperimentConfig cfg;
      cfg.seed = seed * 7919;
      cfg.validate_and_fill();
      for (tip::HumanSpec& h : cfg.humans) {
        for (auto& [robot, params] : h.params_by_robot) params = truth;
      }
      for (const Trajectory& traj :
           tip::generate_synthetic(cfg, NoiseModel::BetaSampled)) {
        FitResult r = tip::fit(traj);
        total += mu_curve_rmse(traj, r.theta_star, truth);
        ++count;
      }
    }
    double mean_rmse = total / count;
    out.require(mean_rmse <= 0.05, "sampled recovery mean rmse " +
                                       fmt(mean_rmse) + " over 30 seeds");
    if (out.pass) out.detail = "sampled mean rmse " + fmt(mean_rmse);
  }
  return out;
}

// --- check 7: qualitative replication of the comparative finding --------

Outcome check_model_comparison() {
  Outcome out;
  const int n_seeds = 20;
  const int n_teams = 15;
  int ordering_holds = 0;
  std::string first_miss;

  for (int exp_seed = 1; exp_seed <= n_seeds; ++exp_seed) {
    // Per robot: one mean fit error per participant for each model.
    std::vector<double> tip_a, tip_b, dir_a, dir_b;

    Rng seeder(static_cast<std::uint64_t>(exp_seed) * 1000003);
    for (int team = 1; team <= n_teams; ++team) {
      ExperimentConfig cfg;
      cfg.seed = seeder.split(static_cast<std::uint64_t>(team)).seed();
      TipParams truth(2, 2, 1, 1, 4, 4);
      cfg.validate_and_fill();
      for (tip::HumanSpec& h : cfg.humans) {
        for (auto& [robot, params] : h.params_by_robot) params = truth;
      }
      auto trajectories = tip::run_experiment(cfg).trajectories;
      for (const Trajectory& traj : trajectories) {
        FitConfig config;
        config.max_iterations = 2000;
        double tip_err = tip::fit(traj, config).mean_fit_error;
        double dir_err = tip::fit_direct_only(traj, config).mean_fit_error;
        if (traj.robot_id == "A") {
          tip_a.push_back(tip_err);
          dir_a.push_back(dir_err);
        } else {
          tip_b.push_back(tip_err);
          dir_b.push_back(dir_err);
        }
      }
    }

    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / v.size();
    };
    auto paired_t = [&](const std::vector<double>& x,
                        const std::vector<double>& y) {
      std::vector<double> diff(x.size());
      for (size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
      double m = mean(diff);
      double ss = 0.0;
      for (double v : diff) ss += (v - m) * (v - m);
      double sd = std::sqrt(ss / (diff.size() - 1));
      return m / (sd / std::sqrt(static_cast<double>(diff.size())));
    };

    bool holds = mean(tip_a) < mean(dir_a) && mean(tip_b) < mean(dir_b) &&
                 paired_t(tip_a, dir_a) < 0.0 && paired_t(tip_b, dir_b) < 0.0;
    if (holds) {
      ++ordering_holds;
    } else if (first_miss.empty()) {
      first_miss = "seed " + std::to_string(exp_seed) + ": tip A " +
                   fmt(mean(tip_a)) + " vs direct A " + fmt(mean(dir_a)) +
                   ", tip B " + fmt(mean(tip_b)) + " vs direct B " +
                   fmt(mean(dir_b));
    }
  }

  out.require(ordering_holds >= 18,
              "ordering held in only " + std::to_string(ordering_holds) +
                  "/20 seeds; first miss: " + first_miss);
  out.detail = std::to_string(ordering_holds) + "/20 seeds" +
               (out.pass ? "" : " — " + out.detail);
  if (!out.pass && !first_miss.empty()) out.detail += " — " + first_miss;
  return out;
}

// --- check 8: baseline nesting ------------------------------------------

Outcome check_nesting() {
  Outcome out;
  Rng rng(808);
  for (int rep = 0; rep < 50; ++rep) {
    Trajectory traj =
        random_trajectory(rng, 6 + static_cast<int>(rng.uniform() * 12), 0.8);

    // Frozen indirect gains must replay exactly like the trajectory with
    // indirect events deleted.
    TipParams frozen(1.3, 2.1, 0.9, 1.4, 0.0, 0.0);
    Trajectory pruned;
    pruned.human_id = traj.human_id;
    pruned.robot_id = traj.robot_id;
    for (const TrustEvent& e : traj.events) {
      if (e.kind != EventKind::Indirect) pruned.events.push_back(e);
    }
    auto full_steps = tip::replay(traj, frozen);
    auto pruned_steps = tip::replay(pruned, frozen);
    size_t j = 0;
    for (size_t k = 0; k < traj.events.size(); ++k) {
      if (traj.events[k].kind == EventKind::Indirect) continue;
      double da = std::fabs(full_steps[k].state.alpha -
                            pruned_steps[j].state.alpha);
      double db =
          std::fabs(full_steps[k].state.beta - pruned_steps[j].state.beta);
      if (da > 1e-12 || db > 1e-12) {
        out.fail("frozen-gain replay differs from pruned replay");
      }
      ++j;
    }

    // The masked fit and the direct-only entry point are the same model.
    FitConfig config;
    config.max_iterations = 1500;
    FitResult masked = tip::fit_masked(
        traj, config, tip::FreeMask{true, true, true, true, false, false});
    FitResult direct = tip::fit_direct_only(traj, config);
    out.require(masked.theta_star.to_array() == direct.theta_star.to_array(),
                "masked and direct-only fits disagree");

    // Nesting: the unrestricted optimum is never below the restricted one.
    FitResult full = tip::fit(traj, config);
    out.require(full.log_likelihood >= direct.log_likelihood - 1e-9,
                "full-model optimum " + fmt(full.log_likelihood) +
                    " below direct-only " + fmt(direct.log_likelihood));
    if (!out.pass) break;
  }
  return out;
}

// --- check 9: simulator separation --------------------------------------

Outcome check_separation() {
  Outcome out;
  TipParams truth(2, 2, 1, 1, 1, 1);
  int a_wins = 0;
  const int n_seeds = 200;
  for (int seed = 0; seed < n_seeds; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed) + 5000;
    auto trajectories = tip::run_experiment(cfg).trajectories;
    double final_a = 0.0, final_b = 0.0;
    for (const Trajectory& traj : trajectories) {
      double mu = tip::replay(traj, truth).back().expected_trust;
      (traj.robot_id == "A" ? final_a : final_b) += mu;
    }
    if (final_a > final_b) ++a_wins;
  }
  out.require(a_wins >= 190, "robot A finished ahead in only " +
                                 std::to_string(a_wins) + "/200 runs");
  out.detail = std::to_string(a_wins) + "/200 runs";

  // Long-run limit of repeated identical direct updates.
  const double cases[][3] = {{2.0, 1.0, 0.9}, {1.0, 1.0, 0.6}, {0.5, 2.0, 0.75}};
  for (const auto& c : cases) {
    TipParams theta(2, 2, c[0], c[1], 0, 0);
    Trajectory traj;
    traj.human_id = "h";
    traj.robot_id = "r";
    traj.events.push_back(TrustEvent::prior(0.5));
    for (int k = 1; k <= 100000; ++k) {
      traj.events.push_back(TrustEvent::direct(k, c[2], 1.0 - c[2]));
    }
    double limit = tip::asymptotic_trust(theta, c[2], 1.0 - c[2]);
    double replayed = tip::replay(traj, theta).back().expected_trust;
    out.require(std::fabs(limit - replayed) <= 1e-3,
                "asymptote " + fmt(limit) + " vs replay " + fmt(replayed));
  }
  return out;
}

// --- check 10: end-to-end determinism ------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

Outcome check_cli_determinism(const std::string& cli) {
  Outcome out;
  if (cli.empty()) {
    out.fail("no --cli path given");
    return out;
  }
  std::string cli_abs = std::filesystem::absolute(cli).string();
  auto base = std::filesystem::temp_directory_path() / "tip_acceptance";
  std::error_code ec;
  std::filesystem::remove_all(base, ec);

  for (const char* run : {"run1", "run2"}) {
    auto dir = base / run;
    std::filesystem::create_directories(dir);
    std::string prefix = "cd '" + dir.string() + "' && '" + cli_abs + "' ";
    const std::string commands[] = {
        "simulate --output . --seed 123 --teams 3 > sim_out.txt 2>&1",
        "fit --input trajectories.csv --output params.csv > fit_out.txt 2>&1",
        "compare --input trajectories.csv > compare_out.txt 2>&1",
    };
    for (const std::string& cmd : commands) {
      int rc = std::system((prefix + cmd).c_str());
      if (rc != 0) {
        out.fail("command failed in " + std::string(run) + ": " + cmd);
        return out;
      }
    }
  }

  for (const char* name :
       {"trajectories.csv", "session_logs.csv", "config.txt", "params.csv",
        "sim_out.txt", "fit_out.txt", "compare_out.txt"}) {
    std::string a = slurp(base / "run1" / name);
    std::string b = slurp(base / "run2" / name);
    if (a.empty()) out.fail(std::string(name) + " is empty");
    if (a != b) out.fail(std::string(name) + " differs between runs");
  }
  std::filesystem::remove_all(base, ec);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }

  struct Criterion {
    int id;
    const char* label;
    double time_limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "special functions vs quadrature/recurrence/round-trip oracles", 10,
       check_special_functions},
      {2, "sequential replay equals closed-form summation (1000 trajectories)",
       10, check_replay_equivalence},
      {3, "analytic gradient vs central finite differences (100 pairs)", 30,
       check_gradient},
      {4, "log likelihood concave along 100 random chords", 30,
       check_concavity},
      {5, "restricted fit matches exhaustive grid search (10 trajectories)",
       120, check_grid_oracle},
      {6, "expected-trust curve recovery on synthetic data", 120,
       check_recovery},
      {7, "full model beats the direct-only baseline on simulated teams", 300,
       check_model_comparison},
      {8, "frozen indirect gains reproduce the nested baseline", 60,
       check_nesting},
      {9, "accuracy separation and asymptotic trust", 120, check_separation},
      {10, "pipeline produces byte-identical outputs across runs", 120,
       [&cli] { return check_cli_determinism(cli); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed >= c.time_limit_s) {
      out.fail("took " + fmt(elapsed) + "s, limit " + fmt(c.time_limit_s) +
               "s");
    }
    if (!out.pass) ++failures;
    std::ostringstream line;
    line << "criterion " << c.id << ": " << (out.pass ? "PASS" : "FAIL")
         << " — " << c.label << " [" << fmt(elapsed) << "s]";
    if (!out.detail.empty()) line << " (" << out.detail << ")";
    std::cout << line.str() << "\n";
  }

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 10 criteria passed\n";
  return 0;
}
