#ifndef TIP_DATAIO_HPP_
#define TIP_DATAIO_HPP_

#include <string>
#include <vector>

#include "tip/inference.hpp"
#include "tip/simulator.hpp"
#include "tip/trust_kernel.hpp"

namespace tip {

// Fitted parameters and diagnostics for one (human, robot) pair, as
// persisted to the params file.
struct ParamsRecord {
  std::string human_id;
  std::string robot_id;
  double alpha0;
  double beta0;
  double s;
  double f;
  double s_hat;
  double f_hat;
  double log_likelihood;
  double mean_fit_error;
  bool converged;
  int iterations;
};

ParamsRecord make_params_record(const std::string& human_id,
                                const std::string& robot_id,
                                const FitResult& result);

// One trajectory plus the team label it was filed under.
struct TrajectoryEntry {
  std::string team_id;
  Trajectory trajectory;
};

struct TrajectoryData {
  std::vector<TrajectoryEntry> entries;  // in order of first appearance
  // Number of trust values clamped into [1e-3, 1-1e-3] at load time.
  int clamp_count = 0;
};

// Trajectory file: delimited text, UTF-8, header row
//   team_id,human_id,robot_id,session,event,perf_success,perf_failure,
//   trust_in_teammate,teammate_trust,reported_trust
// with event in {prior, direct, indirect} and field presence fixed by the
// event kind. Trust values must be in [0,1] on disk and are clamped to
// [1e-3, 1-1e-3] on load (count surfaced in TrajectoryData). Validation
// errors name the offending line.
TrajectoryData load_trajectories(const std::string& path);
void save_trajectories(const std::vector<TrajectoryEntry>& entries,
                       const std::string& path);

// Params file: one row per ParamsRecord, 17-significant-digit round trip.
std::vector<ParamsRecord> load_fit_results(const std::string& path);
void save_fit_results(const std::vector<ParamsRecord>& records,
                      const std::string& path);

// Session log file: one row per (session, human, robot) interaction.
std::vector<SessionLogRow> load_session_logs(const std::string& path);
void save_session_logs(const std::vector<SessionLogRow>& rows,
                       const std::string& path);

// Experiment config: documented `key = value` text (see README). Loading
// applies defaults and validation, so the result is always a resolved,
// runnable configuration.
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);
std::string format_config(const ExperimentConfig& config);

// Shortest exact round-trip decimal form of a double.
std::string double_to_string(double v);

// Writes content via a temp file renamed into place, creating parent
// directories as needed. Used for every file this library produces.
void write_text_file_atomic(const std::string& path,
                            const std::string& content);

}  // namespace tip

#endif  // TIP_DATAIO_HPP_
