#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "tip/errors.hpp"
#include "tip/simulator.hpp"
#include "tip/trust_kernel.hpp"

using tip::AssignmentRule;
using tip::EventKind;
using tip::ExperimentConfig;
using tip::ExperimentResult;
using tip::HumanSpec;
using tip::NoiseModel;
using tip::TipParams;
using tip::Trajectory;

namespace {

HumanSpec make_human(const std::string& id, const TipParams& theta,
                     const std::vector<std::string>& robots) {
  HumanSpec h;
  h.id = id;
  for (const std::string& r : robots) h.params_by_robot.emplace_back(r, theta);
  return h;
}

}  // namespace

TEST_CASE("config validation catches bad rosters and ranges") {
  ExperimentConfig cfg;
  cfg.n_sessions = 0;
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  cfg = ExperimentConfig{};
  cfg.robot_accuracies = {{"A", 1.5}};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  cfg = ExperimentConfig{};
  cfg.robot_accuracies = {{"A", 0.9}, {"A", 0.6}};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  TipParams theta(2, 2, 1, 1, 1, 1);
  cfg = ExperimentConfig{};
  cfg.humans = {make_human("h1", theta, {"A", "B"}),
                make_human("h1", theta, {"A", "B"})};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  // Missing per-robot parameters.
  cfg = ExperimentConfig{};
  cfg.humans = {make_human("h1", theta, {"A"}),
                make_human("h2", theta, {"A", "B"})};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  // Random assignment needs a one-to-one roster.
  cfg = ExperimentConfig{};
  cfg.humans = {make_human("h1", theta, {"A", "B"})};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  // Teammate trust series must have 1 or n_sessions entries, all in (0,1).
  cfg = ExperimentConfig{};
  cfg.humans = {make_human("h1", theta, {"A", "B"}),
                make_human("h2", theta, {"A", "B"})};
  cfg.humans[0].teammate_trust = {0.7, 0.8};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);
  cfg.humans[0].teammate_trust = {1.0};
  CHECK_THROWS_AS(cfg.validate_and_fill(), tip::ValidationError);

  cfg = ExperimentConfig{};
  CHECK_NOTHROW(cfg.validate_and_fill());
  CHECK(cfg.humans.size() == 2);
}

TEST_CASE("default experiment has the protocol shape") {
  ExperimentConfig cfg;
  cfg.seed = 5;
  ExperimentResult result = tip::run_experiment(cfg);

  // 2 humans x 2 robots, a prior plus one event per session each.
  REQUIRE(result.trajectories.size() == 4);
  for (const Trajectory& traj : result.trajectories) {
    CHECK(traj.events.size() == 16);
    CHECK(traj.events.front().kind == EventKind::Prior);
    // Every session carries a fresh rating in this protocol.
    CHECK(traj.report_count() == 16);
    CHECK_NOTHROW(traj.validate());
  }

  // 4 prior rows + 15 sessions x (2 direct + 2 indirect).
  CHECK(result.logs.size() == 64);
  for (const auto& row : result.logs) {
    if (row.role == "direct") {
      CHECK(row.correct_count >= 0);
      CHECK(row.correct_count <= row.n_locations);
      CHECK(row.n_locations == 10);
    }
    if (row.role == "indirect") {
      CHECK(!row.recommender_id.empty());
      CHECK(row.trust_in_teammate == 0.7);
    }
  }
}

TEST_CASE("same seed reproduces the experiment exactly") {
  ExperimentConfig cfg;
  cfg.seed = 123;
  ExperimentResult a = tip::run_experiment(cfg);
  ExperimentResult b = tip::run_experiment(cfg);
  REQUIRE(a.logs.size() == b.logs.size());
  for (size_t i = 0; i < a.logs.size(); ++i) {
    CHECK(a.logs[i].reported_trust == b.logs[i].reported_trust);
    CHECK(a.logs[i].correct_count == b.logs[i].correct_count);
    CHECK(a.logs[i].human_id == b.logs[i].human_id);
    CHECK(a.logs[i].robot_id == b.logs[i].robot_id);
  }

  cfg.seed = 124;
  ExperimentResult c = tip::run_experiment(cfg);
  int diffs = 0;
  for (size_t i = 0; i < a.logs.size(); ++i) {
    if (a.logs[i].reported_trust != c.logs[i].reported_trust) ++diffs;
  }
  CHECK(diffs > 0);
}

TEST_CASE("random assignment is a fresh perfect matching every session") {
  ExperimentConfig cfg;
  cfg.seed = 31;
  ExperimentResult result = tip::run_experiment(cfg);
  for (int k = 1; k <= cfg.n_sessions; ++k) {
    std::multiset<std::string> direct_robots;
    for (const auto& row : result.logs) {
      if (row.session == k && row.role == "direct") {
        direct_robots.insert(row.robot_id);
      }
    }
    CHECK(direct_robots == std::multiset<std::string>{"A", "B"});
  }
}

TEST_CASE("fixed assignment keeps each human on one robot") {
  ExperimentConfig cfg;
  cfg.assignment_rule = AssignmentRule::Fixed;
  cfg.seed = 8;
  ExperimentResult result = tip::run_experiment(cfg);
  for (const Trajectory& traj : result.trajectories) {
    bool own = (traj.human_id == "h1" && traj.robot_id == "A") ||
               (traj.human_id == "h2" && traj.robot_id == "B");
    for (size_t i = 1; i < traj.events.size(); ++i) {
      CHECK(traj.events[i].kind ==
            (own ? EventKind::Direct : EventKind::Indirect));
    }
  }
}

TEST_CASE("alternating assignment swaps robots each session") {
  ExperimentConfig cfg;
  cfg.assignment_rule = AssignmentRule::Alternating;
  cfg.seed = 8;
  ExperimentResult result = tip::run_experiment(cfg);
  for (const Trajectory& traj : result.trajectories) {
    for (size_t i = 1; i < traj.events.size(); ++i) {
      const auto& e = traj.events[i];
      bool direct_expected;
      if (traj.human_id == "h1") {
        direct_expected = (traj.robot_id == "A") == (e.session % 2 == 1);
      } else {
        direct_expected = (traj.robot_id == "B") == (e.session % 2 == 1);
      }
      CHECK((e.kind == EventKind::Direct) == direct_expected);
    }
  }
}

TEST_CASE("expected-value noise reports the replayed expected trust") {
  ExperimentConfig cfg;
  cfg.seed = 77;
  auto trajectories = tip::generate_synthetic(cfg, NoiseModel::ExpectedValue);
  TipParams truth(2, 2, 1, 1, 1, 1);
  for (const Trajectory& traj : trajectories) {
    auto steps = tip::replay(traj, truth);
    for (const auto& step : steps) {
      REQUIRE(step.reported_trust);
      CHECK(*step.reported_trust ==
            doctest::Approx(step.expected_trust).epsilon(1e-12));
    }
  }
}

TEST_CASE("perfect accuracy drives trust monotonically upward") {
  ExperimentConfig cfg;
  cfg.robot_accuracies = {{"A", 1.0}, {"B", 1.0}};
  cfg.n_sessions = 40;
  cfg.seed = 3;
  auto trajectories = tip::generate_synthetic(cfg, NoiseModel::ExpectedValue);
  TipParams truth(2, 2, 1, 1, 1, 1);
  for (const Trajectory& traj : trajectories) {
    auto steps = tip::replay(traj, truth);
    CHECK(steps.back().expected_trust > steps.front().expected_trust);
    CHECK(steps.back().expected_trust > 0.9);
  }
}

TEST_CASE("teammate trust series is consumed per session") {
  ExperimentConfig cfg;
  cfg.n_sessions = 3;
  TipParams theta(2, 2, 1, 1, 1, 1);
  cfg.humans = {make_human("h1", theta, {"A", "B"}),
                make_human("h2", theta, {"A", "B"})};
  cfg.humans[0].teammate_trust = {0.2, 0.5, 0.8};
  cfg.humans[1].teammate_trust = {0.6};
  cfg.seed = 12;
  ExperimentResult result = tip::run_experiment(cfg);
  for (const auto& row : result.logs) {
    if (row.role != "indirect") continue;
    if (row.human_id == "h1") {
      double expected = row.session == 1 ? 0.2 : row.session == 2 ? 0.5 : 0.8;
      CHECK(row.trust_in_teammate == expected);
    } else {
      CHECK(row.trust_in_teammate == 0.6);
    }
  }
}

TEST_CASE("higher accuracy earns higher final expected trust in most runs") {
  TipParams truth(2, 2, 1, 1, 1, 1);
  int a_wins = 0;
  const int n_seeds = 40;
  for (int seed = 0; seed < n_seeds; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    auto trajectories = tip::run_experiment(cfg).trajectories;
    double final_a = 0.0, final_b = 0.0;
    for (const Trajectory& traj : trajectories) {
      double mu = tip::replay(traj, truth).back().expected_trust;
      (traj.robot_id == "A" ? final_a : final_b) += mu;
    }
    if (final_a > final_b) ++a_wins;
  }
  CHECK(a_wins >= 32);  // 80% of 40; the acceptance gate checks 95% of 200
}
