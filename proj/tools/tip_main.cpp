// Command line front end: simulate, fit, evaluate, compare, report.
//
// Exit codes: 0 success, 2 validation/usage errors, 3 file IO errors,
// 1 anything else. Every run echoes the resolved options up front so a
// captured log is enough to rerun it.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tip/dataio.hpp"
#include "tip/errors.hpp"
#include "tip/inference.hpp"
#include "tip/rng.hpp"
#include "tip/simulator.hpp"
#include "tip/special_functions.hpp"
#include "tip/trust_kernel.hpp"

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

// Runs body(0..n-1) across a bounded pool. Indices are claimed from an
// atomic counter, results land in caller-owned slots, so output order
// stays deterministic regardless of scheduling.
template <typename Body>
void parallel_for(int n, Body&& body) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min(n, static_cast<int>(hw == 0 ? 4 : hw));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

const tip::Trajectory* find_trajectory(
    const std::vector<tip::TrajectoryEntry>& entries, const std::string& human,
    const std::string& robot) {
  for (const tip::TrajectoryEntry& e : entries) {
    if (e.trajectory.human_id == human && e.trajectory.robot_id == robot) {
      return &e.trajectory;
    }
  }
  return nullptr;
}

void note_clamps(const tip::TrajectoryData& data) {
  if (data.clamp_count > 0) {
    std::cout << "note: clamped " << data.clamp_count
              << " trust value(s) into [0.001, 0.999] on load\n";
  }
}

// Groups indices by robot id, preserving first-appearance order.
std::vector<std::pair<std::string, std::vector<int>>> group_by_robot(
    const std::vector<tip::TrajectoryEntry>& entries) {
  std::vector<std::pair<std::string, std::vector<int>>> groups;
  for (int i = 0; i < static_cast<int>(entries.size()); ++i) {
    const std::string& robot = entries[static_cast<std::size_t>(i)].trajectory.robot_id;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == robot; });
    if (it == groups.end()) {
      groups.push_back({robot, {i}});
    } else {
      it->second.push_back(i);
    }
  }
  return groups;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct SimulateArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int teams = 1;
};

int run_simulate(const SimulateArgs& args) {
  tip::ExperimentConfig base;
  if (!args.config_path.empty()) {
    base = tip::load_config(args.config_path);
  } else {
    base.validate_and_fill();
  }
  if (args.seed) base.seed = *args.seed;

  std::cout << "tip simulate: output=" << args.out_dir
            << " teams=" << args.teams << " seed=" << base.seed << "\n";
  std::cout << "resolved configuration:\n" << tip::format_config(base);

  int label_width =
      std::max(2, static_cast<int>(std::to_string(args.teams).size()));
  std::vector<tip::TrajectoryEntry> entries;
  std::vector<tip::SessionLogRow> logs;
  for (int t = 1; t <= args.teams; ++t) {
    std::string num = std::to_string(t);
    std::string label =
        "g" +
        std::string(static_cast<std::size_t>(
                        std::max(0, label_width - static_cast<int>(num.size()))),
                    '0') +
        num;
    tip::ExperimentConfig cfg = base;
    if (args.teams > 1) {
      // Independent stream per team, derived from the base seed.
      cfg.seed = tip::Rng(base.seed).split(static_cast<std::uint64_t>(t)).seed();
      for (tip::HumanSpec& h : cfg.humans) h.id = label + "-" + h.id;
    }
    tip::ExperimentResult result = tip::run_experiment(cfg);
    for (tip::Trajectory& traj : result.trajectories) {
      entries.push_back(tip::TrajectoryEntry{label, std::move(traj)});
    }
    logs.insert(logs.end(), result.logs.begin(), result.logs.end());
  }

  std::string traj_path = args.out_dir + "/trajectories.csv";
  std::string log_path = args.out_dir + "/session_logs.csv";
  std::string cfg_path = args.out_dir + "/config.txt";
  tip::save_trajectories(entries, traj_path);
  tip::save_session_logs(logs, log_path);
  std::string cfg_text = tip::format_config(base);
  if (args.teams > 1) {
    cfg_text += "# teams = " + std::to_string(args.teams) + "\n";
  }
  tip::write_text_file_atomic(cfg_path, cfg_text);

  std::cout << "wrote " << traj_path << " (" << entries.size()
            << " trajectories)\n";
  std::cout << "wrote " << log_path << " (" << logs.size() << " rows)\n";
  std::cout << "wrote " << cfg_path << "\n";
  return 0;
}

// Shared table printer for fit and evaluate.
void print_pair_table(const std::vector<tip::TrajectoryEntry>& entries,
                      const std::vector<tip::FitResult>& results) {
  std::size_t human_w = 5, robot_w = 5;
  for (const tip::TrajectoryEntry& e : entries) {
    human_w = std::max(human_w, e.trajectory.human_id.size());
    robot_w = std::max(robot_w, e.trajectory.robot_id.size());
  }
  std::cout << pad("human", human_w + 2) << pad("robot", robot_w + 2)
            << pad("mean_fit_error", 16) << pad("log_likelihood", 18)
            << pad("iters", 7) << "converged\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const tip::Trajectory& traj = entries[i].trajectory;
    const tip::FitResult& r = results[i];
    std::cout << pad(traj.human_id, human_w + 2) << pad(traj.robot_id, robot_w + 2)
              << pad(fixed6(r.mean_fit_error), 16)
              << pad(fixed6(r.log_likelihood), 18)
              << pad(std::to_string(r.iterations), 7)
              << (r.converged ? "yes" : "no")
              << (r.low_data ? "  (low data: fewer than 2 reports)" : "")
              << "\n";
  }
}

void print_rmse_lines(const std::vector<tip::TrajectoryEntry>& entries,
                      const std::vector<tip::FitResult>& results) {
  for (const auto& [robot, idx] : group_by_robot(entries)) {
    std::vector<tip::FitResult> group;
    for (int i : idx) group.push_back(results[static_cast<std::size_t>(i)]);
    std::cout << "rmse " << robot << ": " << fixed6(tip::rmse(group)) << " (n="
              << group.size() << ")\n";
  }
}

struct FitArgs {
  std::string input;
  std::string output;
  std::string model = "tip";
  int max_iters = 5000;
  double tol = 1e-6;
};

int run_fit(const FitArgs& args) {
  tip::FitConfig fc;
  fc.max_iterations = args.max_iters;
  fc.gradient_tolerance = args.tol;
  fc.validate();
  bool direct_only = args.model == "direct-only";

  std::cout << "tip fit: input=" << args.input << " output=" << args.output
            << " model=" << args.model << " max_iters=" << args.max_iters
            << " tol=" << tip::double_to_string(args.tol) << " seed=none\n";

  tip::TrajectoryData data = tip::load_trajectories(args.input);
  note_clamps(data);
  int n = static_cast<int>(data.entries.size());
  std::vector<std::optional<tip::FitResult>> slots(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) {
    const tip::Trajectory& traj = data.entries[static_cast<std::size_t>(i)].trajectory;
    slots[static_cast<std::size_t>(i)] =
        direct_only ? tip::fit_direct_only(traj, fc) : tip::fit(traj, fc);
  });
  std::vector<tip::FitResult> results;
  results.reserve(slots.size());
  for (std::optional<tip::FitResult>& s : slots) results.push_back(std::move(*s));

  print_pair_table(data.entries, results);
  print_rmse_lines(data.entries, results);

  std::vector<tip::ParamsRecord> records;
  records.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    records.push_back(tip::make_params_record(data.entries[i].trajectory.human_id,
                                              data.entries[i].trajectory.robot_id,
                                              results[i]));
  }
  tip::save_fit_results(records, args.output);
  std::cout << "wrote " << args.output << " (" << records.size() << " rows)\n";
  return 0;
}

struct EvaluateArgs {
  std::string input;
  std::string params;
};

int run_evaluate(const EvaluateArgs& args) {
  std::cout << "tip evaluate: input=" << args.input
            << " params=" << args.params << " seed=none\n";
  tip::TrajectoryData data = tip::load_trajectories(args.input);
  note_clamps(data);
  std::vector<tip::ParamsRecord> records = tip::load_fit_results(args.params);

  std::vector<tip::TrajectoryEntry> matched;
  std::vector<tip::FitResult> results;
  for (const tip::ParamsRecord& rec : records) {
    const tip::Trajectory* traj =
        find_trajectory(data.entries, rec.human_id, rec.robot_id);
    if (traj == nullptr) {
      throw tip::ValidationError("params row (" + rec.human_id + ", " +
                                 rec.robot_id +
                                 ") has no matching trajectory in " +
                                 args.input);
    }
    tip::TipParams theta(rec.alpha0, rec.beta0, rec.s, rec.f, rec.s_hat,
                         rec.f_hat);
    std::vector<tip::SessionFit> sessions = tip::session_fits(*traj, theta);
    double sum = 0.0;
    for (const tip::SessionFit& s : sessions) sum += s.fit_error;
    double mean_err =
        sessions.empty() ? 0.0 : sum / static_cast<double>(sessions.size());
    tip::FitResult r{theta,
                     tip::log_likelihood(*traj, theta),
                     std::move(sessions),
                     mean_err,
                     rec.converged,
                     rec.iterations,
                     traj->report_count() < 2};
    matched.push_back(tip::TrajectoryEntry{"", *traj});
    results.push_back(std::move(r));
  }
  if (matched.size() < data.entries.size()) {
    std::cout << "note: " << data.entries.size() - matched.size()
              << " trajectories in the input had no params row\n";
  }
  print_pair_table(matched, results);
  print_rmse_lines(matched, results);
  return 0;
}

struct CompareArgs {
  std::string input;
  int max_iters = 5000;
  double tol = 1e-6;
};

int run_compare(const CompareArgs& args) {
  tip::FitConfig fc;
  fc.max_iterations = args.max_iters;
  fc.gradient_tolerance = args.tol;
  fc.validate();

  std::cout << "tip compare: input=" << args.input
            << " max_iters=" << args.max_iters
            << " tol=" << tip::double_to_string(args.tol) << " seed=none\n";

  tip::TrajectoryData data = tip::load_trajectories(args.input);
  note_clamps(data);
  int n = static_cast<int>(data.entries.size());
  if (n == 0) throw tip::ValidationError("compare: input has no trajectories");

  std::vector<std::optional<tip::FitResult>> full_slots(
      static_cast<std::size_t>(n));
  std::vector<std::optional<tip::FitResult>> direct_slots(
      static_cast<std::size_t>(n));
  parallel_for(2 * n, [&](int j) {
    int i = j / 2;
    const tip::Trajectory& traj = data.entries[static_cast<std::size_t>(i)].trajectory;
    if (j % 2 == 0) {
      full_slots[static_cast<std::size_t>(i)] = tip::fit(traj, fc);
    } else {
      direct_slots[static_cast<std::size_t>(i)] = tip::fit_direct_only(traj, fc);
    }
  });
  std::vector<tip::FitResult> full, direct;
  full.reserve(full_slots.size());
  direct.reserve(direct_slots.size());
  for (std::optional<tip::FitResult>& s : full_slots) full.push_back(std::move(*s));
  for (std::optional<tip::FitResult>& s : direct_slots) direct.push_back(std::move(*s));

  std::size_t human_w = 5, robot_w = 5;
  for (const tip::TrajectoryEntry& e : data.entries) {
    human_w = std::max(human_w, e.trajectory.human_id.size());
    robot_w = std::max(robot_w, e.trajectory.robot_id.size());
  }
  std::cout << pad("human", human_w + 2) << pad("robot", robot_w + 2)
            << pad("tip_err", 12) << pad("direct_err", 12) << "diff\n";
  for (std::size_t i = 0; i < data.entries.size(); ++i) {
    const tip::Trajectory& traj = data.entries[i].trajectory;
    std::cout << pad(traj.human_id, human_w + 2)
              << pad(traj.robot_id, robot_w + 2)
              << pad(fixed6(full[i].mean_fit_error), 12)
              << pad(fixed6(direct[i].mean_fit_error), 12)
              << fixed6(full[i].mean_fit_error - direct[i].mean_fit_error)
              << "\n";
  }

  for (const auto& [robot, idx] : group_by_robot(data.entries)) {
    std::vector<double> tip_errs, direct_errs, diffs;
    std::vector<tip::FitResult> tip_group, direct_group;
    for (int i : idx) {
      std::size_t k = static_cast<std::size_t>(i);
      tip_errs.push_back(full[k].mean_fit_error);
      direct_errs.push_back(direct[k].mean_fit_error);
      diffs.push_back(full[k].mean_fit_error - direct[k].mean_fit_error);
      tip_group.push_back(full[k]);
      direct_group.push_back(direct[k]);
    }
    std::size_t count = idx.size();
    if (count < 2) {
      throw tip::ValidationError(
          "compare: robot " + robot +
          " has fewer than 2 participants; paired statistics need >= 2");
    }
    double tip_mean = mean_of(tip_errs);
    double direct_mean = mean_of(direct_errs);
    double diff_mean = mean_of(diffs);
    double diff_sd = sample_sd(diffs, diff_mean);
    std::cout << "robot " << robot << ": n=" << count << "\n";
    std::cout << "  tip          mean fit error = " << fixed3(tip_mean)
              << " +/- " << fixed3(sample_sd(tip_errs, tip_mean))
              << "  rmse = " << fixed3(tip::rmse(tip_group)) << "\n";
    std::cout << "  direct-only  mean fit error = " << fixed3(direct_mean)
              << " +/- " << fixed3(sample_sd(direct_errs, direct_mean))
              << "  rmse = " << fixed3(tip::rmse(direct_group)) << "\n";
    std::cout << "  paired diff (tip - direct)   = " << fixed3(diff_mean)
              << " +/- " << fixed3(diff_sd) << "  t(" << count - 1 << ") = ";
    if (diff_sd == 0.0) {
      std::cout << "n/a (zero variance)\n";
    } else {
      double tstat =
          diff_mean / (diff_sd / std::sqrt(static_cast<double>(count)));
      std::cout << fixed3(tstat) << "\n";
    }
  }

  std::cout << "reference (15-team human-subject study, n=30 participants):\n"
            << "  robot A: tip 0.044 +/- 0.037, direct-only 0.075 +/- 0.041, "
               "t(29) = -6.18, rmse tip 0.057, rmse direct 0.085\n"
            << "  robot B: tip 0.069 +/- 0.045, direct-only 0.095 +/- 0.051, "
               "t(29) = -7.31, rmse tip 0.082, rmse direct 0.107\n";
  return 0;
}

struct ReportArgs {
  std::string input;
  std::string params;
  std::string output;
};

int run_report(const ReportArgs& args) {
  std::cout << "tip report: input=" << args.input << " params=" << args.params
            << " output=" << args.output << " seed=none\n";
  tip::TrajectoryData data = tip::load_trajectories(args.input);
  note_clamps(data);
  std::vector<tip::ParamsRecord> records = tip::load_fit_results(args.params);

  std::ostringstream out;
  out << "human_id,robot_id,session,reported_trust,expected_trust,q05,q95\n";
  int rows = 0;
  std::vector<std::string> coverage;
  for (const tip::ParamsRecord& rec : records) {
    const tip::Trajectory* traj =
        find_trajectory(data.entries, rec.human_id, rec.robot_id);
    if (traj == nullptr) {
      throw tip::ValidationError("params row (" + rec.human_id + ", " +
                                 rec.robot_id +
                                 ") has no matching trajectory in " +
                                 args.input);
    }
    tip::TipParams theta(rec.alpha0, rec.beta0, rec.s, rec.f, rec.s_hat,
                         rec.f_hat);
    int inside = 0, reported = 0;
    for (const tip::ReplayStep& step : tip::replay(*traj, theta)) {
      if (!step.reported_trust) continue;
      tip::BetaParams bp{step.state.alpha, step.state.beta};
      double q05 = tip::beta_quantile(0.05, bp);
      double q95 = tip::beta_quantile(0.95, bp);
      out << rec.human_id << ',' << rec.robot_id << ',' << step.session << ','
          << tip::double_to_string(*step.reported_trust) << ','
          << tip::double_to_string(step.expected_trust) << ','
          << tip::double_to_string(q05) << ',' << tip::double_to_string(q95)
          << "\n";
      ++rows;
      ++reported;
      if (*step.reported_trust >= q05 && *step.reported_trust <= q95) ++inside;
    }
    coverage.push_back(rec.human_id + " " + rec.robot_id + ": " +
                       std::to_string(inside) + "/" + std::to_string(reported) +
                       " reports inside the central 90% band");
  }
  tip::write_text_file_atomic(args.output, out.str());
  for (const std::string& line : coverage) std::cout << line << "\n";
  std::cout << "wrote " << args.output << " (" << rows << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-distribution trust dynamics: simulate, fit, compare"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the multi-session detection protocol and write "
                  "trajectories + session logs");
  sim->add_option("--config", sim_args.config_path,
                  "Experiment config file (key = value); defaults used if omitted")
      ->check(CLI::ExistingFile);
  sim->add_option("--output", sim_args.out_dir, "Output directory")
      ->capture_default_str();
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      sim->add_option("--seed", seed_value, "Override the config seed");
  sim->add_option("--teams", sim_args.teams,
                  "Number of independent teams to simulate")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit per-pair parameters to a trajectory file by maximum "
             "likelihood");
  fit->add_option("--input", fit_args.input, "Trajectory file")->required();
  fit->add_option("--output", fit_args.output, "Params file to write")
      ->required();
  fit->add_option("--model", fit_args.model, "Model variant")
      ->check(CLI::IsMember({"tip", "direct-only"}))
      ->capture_default_str();
  fit->add_option("--max-iters", fit_args.max_iters, "Iteration cap")
      ->check(CLI::Range(1, 100000000))
      ->capture_default_str();
  fit->add_option("--tol", fit_args.tol,
                  "Projected-gradient stopping tolerance")
      ->capture_default_str();

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score an existing params file against a trajectory file "
                  "(no refitting)");
  evaluate->add_option("--input", eval_args.input, "Trajectory file")
      ->required();
  evaluate->add_option("--params", eval_args.params, "Params file")
      ->required();

  CompareArgs cmp_args;
  CLI::App* compare = app.add_subcommand(
      "compare", "Fit full and direct-only variants and print paired "
                 "per-robot statistics");
  compare->add_option("--input", cmp_args.input, "Trajectory file")
      ->required();
  compare->add_option("--max-iters", cmp_args.max_iters, "Iteration cap")
      ->check(CLI::Range(1, 100000000))
      ->capture_default_str();
  compare->add_option("--tol", cmp_args.tol,
                      "Projected-gradient stopping tolerance")
      ->capture_default_str();

  ReportArgs rep_args;
  CLI::App* report = app.add_subcommand(
      "report", "Write per-session expected trust with a central 90% "
                "credible band");
  report->add_option("--input", rep_args.input, "Trajectory file")->required();
  report->add_option("--params", rep_args.params, "Params file")->required();
  report->add_option("--output", rep_args.output, "Report file to write")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      if (seed_opt->count() > 0) sim_args.seed = seed_value;
      return run_simulate(sim_args);
    }
    if (fit->parsed()) return run_fit(fit_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (compare->parsed()) return run_compare(cmp_args);
    if (report->parsed()) return run_report(rep_args);
  } catch (const tip::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tip::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tip::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
