#ifndef TIP_SIMULATOR_HPP_
#define TIP_SIMULATOR_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tip/trust_kernel.hpp"

namespace tip {

// Ground-truth description of one simulated human: a TipParams per robot
// and an exogenous teammate-trust series t^{x,y} (one entry = constant,
// otherwise one value per session 1..K). Teammate trust is measured data
// in the protocol, never modeled, so it stays configuration here.
struct HumanSpec {
  std::string id;
  std::vector<std::pair<std::string, TipParams>> params_by_robot;
  std::vector<double> teammate_trust{0.7};

  const TipParams& params_for(const std::string& robot_id) const;
  double teammate_trust_at(int session) const;
};

enum class AssignmentRule { RandomEachSession, Fixed, Alternating };

// Protocol configuration: K sessions of a detection task at n_locations
// sites, robots drawing Binomial(n_locations, accuracy) correct counts,
// humans reporting after each session. Defaults reproduce the two-human
// two-drone protocol (15 sessions, 10 locations, accuracies 0.9/0.6).
struct ExperimentConfig {
  int n_sessions = 15;
  int n_locations = 10;
  std::vector<std::pair<std::string, double>> robot_accuracies = {
      {"A", 0.9}, {"B", 0.6}};
  std::vector<HumanSpec> humans;
  AssignmentRule assignment_rule = AssignmentRule::RandomEachSession;
  std::uint64_t seed = 0;

  // Fills in the default two-human roster when none is given, then checks
  // ranges, id uniqueness, per-robot params coverage, and that the
  // assignment rule matches the roster shape.
  void validate_and_fill();
};

// Flat record of everything observed in one session, one row per
// (human, robot) interaction.
struct SessionLogRow {
  int session;
  std::string human_id;
  std::string robot_id;
  std::string role;  // "prior" | "direct" | "indirect"
  int correct_count = 0;   // direct rows
  int n_locations = 0;     // direct rows
  double reported_trust = 0.0;
  double trust_in_teammate = 0.0;   // indirect rows: t^{x,y} used
  std::string recommender_id;       // indirect rows
  double recommender_report = 0.0;  // indirect rows: t^{y,A} used
};

enum class NoiseModel { BetaSampled, ExpectedValue };

struct ExperimentResult {
  std::vector<SessionLogRow> logs;
  std::vector<Trajectory> trajectories;  // ordered by (human, robot)
};

// Runs the full protocol: per session, assign robots, draw each robot's
// correct count, apply direct updates and report, exchange reports, apply
// indirect updates for the other robots and report. Session 0 emits prior
// ratings sampled from Beta(alpha0, beta0). Fully deterministic per seed;
// the draw order is documented in the README.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Same dynamics with a choice of report noise: BetaSampled draws reports
// from the current Beta state, ExpectedValue reports the expected trust
// exactly (noise-free data for optimizer checks).
std::vector<Trajectory> generate_synthetic(const ExperimentConfig& config,
                                           NoiseModel noise);

}  // namespace tip

#endif  // TIP_SIMULATOR_HPP_
