#include "tip/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tip/errors.hpp"
#include "tip/rng.hpp"
#include "tip/special_functions.hpp"

namespace tip {

namespace {

TipParams default_ground_truth() {
  return TipParams(2.0, 2.0, 1.0, 1.0, 1.0, 1.0);
}

// Fisher-Yates permutation of {0..n-1}; one uniform per swap, in a fixed
// order, so the assignment stream is reproducible.
std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform() * (i + 1));
    if (j > i) j = i;
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

struct Engine {
  const ExperimentConfig& config;
  NoiseModel noise;
  Rng rng;

  // state[h][r] is human h's experience with robot r.
  std::vector<std::vector<ExperienceState>> state;
  std::vector<Trajectory> trajectories;  // h * n_robots + r
  std::vector<SessionLogRow> logs;

  explicit Engine(const ExperimentConfig& cfg, NoiseModel noise_model)
      : config(cfg), noise(noise_model), rng(cfg.seed) {}

  int n_humans() const { return static_cast<int>(config.humans.size()); }
  int n_robots() const {
    return static_cast<int>(config.robot_accuracies.size());
  }
  Trajectory& traj(int h, int r) { return trajectories[h * n_robots() + r]; }

  double report(ExperienceState& st) {
    double value;
    if (noise == NoiseModel::ExpectedValue) {
      value = st.alpha / (st.alpha + st.beta);
    } else {
      value = beta_sample(BetaParams(st.alpha, st.beta), rng);
    }
    st.last_reported_trust = value;
    return value;
  }

  std::vector<int> assign(int session) {
    std::vector<int> assigned(n_humans());
    switch (config.assignment_rule) {
      case AssignmentRule::RandomEachSession: {
        std::vector<int> perm = random_permutation(n_robots(), rng);
        for (int h = 0; h < n_humans(); ++h) assigned[h] = perm[h];
        break;
      }
      case AssignmentRule::Fixed:
        for (int h = 0; h < n_humans(); ++h) assigned[h] = h % n_robots();
        break;
      case AssignmentRule::Alternating:
        for (int h = 0; h < n_humans(); ++h) {
          assigned[h] = (h + session - 1) % n_robots();
        }
        break;
    }
    return assigned;
  }

  void emit_priors() {
    for (int h = 0; h < n_humans(); ++h) {
      const HumanSpec& human = config.humans[h];
      for (int r = 0; r < n_robots(); ++r) {
        const TipParams& theta = human.params_for(
            config.robot_accuracies[r].first);
        state[h][r] = ExperienceState{theta.alpha0, theta.beta0, {}};
        double t0 = report(state[h][r]);
        traj(h, r).events.push_back(TrustEvent::prior(t0));
        logs.push_back(SessionLogRow{0, human.id,
                                     config.robot_accuracies[r].first,
                                     "prior", 0, 0, t0, 0.0, "", 0.0});
      }
    }
  }

  void run_session(int k) {
    std::vector<int> assigned = assign(k);

    std::vector<int> correct(n_robots(), 0);
    for (int r = 0; r < n_robots(); ++r) {
      correct[r] =
          rng.binomial(config.n_locations, config.robot_accuracies[r].second);
    }

    // Direct phase: each human updates and reports on the assigned robot.
    std::vector<double> direct_report(n_humans());
    for (int h = 0; h < n_humans(); ++h) {
      int r = assigned[h];
      const HumanSpec& human = config.humans[h];
      const TipParams& theta =
          human.params_for(config.robot_accuracies[r].first);
      double p = static_cast<double>(correct[r]) / config.n_locations;
      double pbar = 1.0 - p;
      state[h][r] = direct_update(state[h][r], theta, p, pbar);
      double t = report(state[h][r]);
      direct_report[h] = t;
      traj(h, r).events.push_back(TrustEvent::direct(k, p, pbar, t));
      logs.push_back(SessionLogRow{k, human.id,
                                   config.robot_accuracies[r].first, "direct",
                                   correct[r], config.n_locations, t, 0.0, "",
                                   0.0});
    }

    // Reports exchanged; indirect phase for every unassigned robot. With
    // more than one teammate on a robot, the first-listed one is the
    // recommender.
    for (int h = 0; h < n_humans(); ++h) {
      const HumanSpec& human = config.humans[h];
      double t_xy = human.teammate_trust_at(k);
      for (int r = 0; r < n_robots(); ++r) {
        if (assigned[h] == r) continue;
        int recommender = -1;
        for (int y = 0; y < n_humans(); ++y) {
          if (y != h && assigned[y] == r) {
            recommender = y;
            break;
          }
        }
        if (recommender < 0) continue;
        const TipParams& theta =
            human.params_for(config.robot_accuracies[r].first);
        double t_ya = direct_report[recommender];
        double own_prev = *state[h][r].last_reported_trust;
        state[h][r] =
            indirect_update(state[h][r], theta, t_xy, t_ya, own_prev);
        double t = report(state[h][r]);
        traj(h, r).events.push_back(TrustEvent::indirect(k, t_xy, t_ya, t));
        logs.push_back(SessionLogRow{
            k, human.id, config.robot_accuracies[r].first, "indirect", 0, 0,
            t, t_xy, config.humans[recommender].id, t_ya});
      }
    }
  }

  ExperimentResult run() {
    state.assign(n_humans(), std::vector<ExperienceState>(
                                 n_robots(), ExperienceState{1.0, 1.0, {}}));
    trajectories.assign(n_humans() * n_robots(), Trajectory{});
    for (int h = 0; h < n_humans(); ++h) {
      for (int r = 0; r < n_robots(); ++r) {
        traj(h, r).human_id = config.humans[h].id;
        traj(h, r).robot_id = config.robot_accuracies[r].first;
      }
    }
    emit_priors();
    for (int k = 1; k <= config.n_sessions; ++k) run_session(k);
    for (Trajectory& t : trajectories) t.validate();
    return ExperimentResult{std::move(logs), std::move(trajectories)};
  }
};

}  // namespace

const TipParams& HumanSpec::params_for(const std::string& robot_id) const {
  for (const auto& [id, params] : params_by_robot) {
    if (id == robot_id) return params;
  }
  throw ValidationError("human " + id + " has no parameters for robot " +
                        robot_id);
}

double HumanSpec::teammate_trust_at(int session) const {
  if (teammate_trust.size() == 1) return teammate_trust.front();
  return teammate_trust.at(static_cast<size_t>(session) - 1);
}

void ExperimentConfig::validate_and_fill() {
  if (n_sessions < 1) {
    throw ValidationError("n_sessions must be positive");
  }
  if (n_locations < 1) {
    throw ValidationError("n_locations must be positive");
  }
  if (robot_accuracies.empty()) {
    throw ValidationError("at least one robot is required");
  }
  std::set<std::string> robot_ids;
  for (const auto& [id, acc] : robot_accuracies) {
    if (id.empty()) throw ValidationError("robot id must be nonempty");
    if (!robot_ids.insert(id).second) {
      throw ValidationError("duplicate robot id " + id);
    }
    if (!(acc >= 0.0 && acc <= 1.0)) {
      throw ValidationError("accuracy for robot " + id +
                            " must be in [0,1], got " + std::to_string(acc));
    }
  }
  if (humans.empty()) {
    for (const std::string& id : {"h1", "h2"}) {
      HumanSpec spec;
      spec.id = id;
      for (const auto& [robot_id, acc] : robot_accuracies) {
        spec.params_by_robot.emplace_back(robot_id, default_ground_truth());
      }
      humans.push_back(std::move(spec));
    }
  }
  std::set<std::string> human_ids;
  for (const HumanSpec& h : humans) {
    if (h.id.empty()) throw ValidationError("human id must be nonempty");
    if (!human_ids.insert(h.id).second) {
      throw ValidationError("duplicate human id " + h.id);
    }
    for (const auto& [robot_id, acc] : robot_accuracies) {
      h.params_for(robot_id);  // throws when missing
    }
    if (h.teammate_trust.empty()) {
      throw ValidationError("human " + h.id +
                            " needs a teammate trust value or series");
    }
    if (h.teammate_trust.size() != 1 &&
        h.teammate_trust.size() != static_cast<size_t>(n_sessions)) {
      throw ValidationError("human " + h.id + " teammate trust series must " +
                            "have 1 or n_sessions entries");
    }
    for (double v : h.teammate_trust) {
      if (!(v > 0.0 && v < 1.0)) {
        throw ValidationError("human " + h.id +
                              " teammate trust must be in (0,1)");
      }
    }
  }
  if (assignment_rule == AssignmentRule::RandomEachSession &&
      humans.size() != robot_accuracies.size()) {
    throw ValidationError(
        "random assignment pairs humans with robots one-to-one; human and "
        "robot counts must match");
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.validate_and_fill();
  Engine engine(cfg, NoiseModel::BetaSampled);
  return engine.run();
}

std::vector<Trajectory> generate_synthetic(const ExperimentConfig& config,
                                           NoiseModel noise) {
  ExperimentConfig cfg = config;
  cfg.validate_and_fill();
  Engine engine(cfg, noise);
  return engine.run().trajectories;
}

}  // namespace tip
