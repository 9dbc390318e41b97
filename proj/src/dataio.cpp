#include "tip/dataio.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>

#include "tip/errors.hpp"

namespace tip {

namespace {

constexpr double kTrustClampEps = 1e-3;

const char* kTrajectoryHeader =
    "team_id,human_id,robot_id,session,event,perf_success,perf_failure,"
    "trust_in_teammate,teammate_trust,reported_trust";

const char* kParamsHeader =
    "human_id,robot_id,alpha0,beta0,s,f,s_hat,f_hat,log_likelihood,"
    "mean_fit_error,converged,iterations";

const char* kSessionLogHeader =
    "session,human_id,robot_id,role,correct_count,n_locations,"
    "reported_trust,trust_in_teammate,recommender_id,recommender_report";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void require_clean_id(const std::string& id, const std::string& what) {
  if (id.find_first_of(",\n\r") != std::string::npos) {
    throw ValidationError(what + " must not contain commas or newlines: '" +
                          id + "'");
  }
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(context + ": expected a number, got '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& context) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(context + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return in;
}

std::string read_header_line(std::ifstream& in, const std::string& path,
                             const char* expected) {
  std::string header;
  if (!std::getline(in, header)) {
    throw ValidationError(path + ": empty file (missing header row)");
  }
  header = strip_cr(header);
  if (header != expected) {
    throw ValidationError(path + ": line 1: expected header '" +
                          std::string(expected) + "', got '" + header + "'");
  }
  return header;
}

// Clamps a trust value into [1e-3, 1-1e-3]; range-checks against [0,1]
// first. Counts each clamp.
double load_trust(const std::string& raw, const std::string& context,
                  int* clamp_count) {
  double v = parse_double(raw, context);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(context + ": trust value " + raw +
                          " outside [0,1]");
  }
  if (v < kTrustClampEps) {
    ++*clamp_count;
    return kTrustClampEps;
  }
  if (v > 1.0 - kTrustClampEps) {
    ++*clamp_count;
    return 1.0 - kTrustClampEps;
  }
  return v;
}

}  // namespace

// Failed runs must never leave a partial output file behind, so every
// writer goes through a temp file renamed into place.
void write_text_file_atomic(const std::string& path,
                            const std::string& content) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    throw IoError("cannot move '" + tmp + "' to '" + path +
                  "': " + ec.message());
  }
}

std::string double_to_string(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    throw IoError("failed to format a floating-point value");
  }
  return std::string(buf, ptr);
}

ParamsRecord make_params_record(const std::string& human_id,
                                const std::string& robot_id,
                                const FitResult& result) {
  const TipParams& t = result.theta_star;
  return ParamsRecord{human_id,  robot_id,
                      t.alpha0,  t.beta0,
                      t.s,       t.f,
                      t.s_hat,   t.f_hat,
                      result.log_likelihood, result.mean_fit_error,
                      result.converged,      result.iterations};
}

TrajectoryData load_trajectories(const std::string& path) {
  std::ifstream in = open_input(path);
  read_header_line(in, path, kTrajectoryHeader);

  TrajectoryData data;
  // Key: (human_id, robot_id) -> index into entries. First-appearance order
  // is preserved in entries itself.
  std::map<std::pair<std::string, std::string>, size_t> index;

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::string where = path + ": line " + std::to_string(line_no);
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 10) {
      throw ValidationError(where + ": expected 10 fields, got " +
                            std::to_string(f.size()));
    }
    const std::string& team_id = f[0];
    const std::string& human_id = f[1];
    const std::string& robot_id = f[2];
    if (team_id.empty() || human_id.empty() || robot_id.empty()) {
      throw ValidationError(where +
                            ": team_id, human_id, robot_id are required");
    }
    int session = parse_int(f[3], where + ": session");
    if (session < 0) {
      throw ValidationError(where + ": session must be >= 0");
    }
    const std::string& event = f[4];

    auto required = [&](int idx, const char* name) -> const std::string& {
      if (f[idx].empty()) {
        throw ValidationError(where + ": " + event + " row missing " + name);
      }
      return f[idx];
    };
    auto forbidden = [&](int idx, const char* name) {
      if (!f[idx].empty()) {
        throw ValidationError(where + ": " + event + " row must not set " +
                              name);
      }
    };

    std::optional<double> reported;
    if (!f[9].empty()) {
      reported =
          load_trust(f[9], where + ": reported_trust", &data.clamp_count);
    }

    TrustEvent ev = TrustEvent::prior(0.5);  // replaced below
    try {
      if (event == "prior") {
        forbidden(5, "perf_success");
        forbidden(6, "perf_failure");
        forbidden(7, "trust_in_teammate");
        forbidden(8, "teammate_trust");
        required(9, "reported_trust");
        if (session != 0) {
          throw ValidationError(where + ": prior row must have session 0");
        }
        ev = TrustEvent::prior(*reported);
      } else if (event == "direct") {
        forbidden(7, "trust_in_teammate");
        forbidden(8, "teammate_trust");
        double p = parse_double(required(5, "perf_success"),
                                where + ": perf_success");
        double pbar = parse_double(required(6, "perf_failure"),
                                   where + ": perf_failure");
        ev = TrustEvent::direct(session, p, pbar, reported);
      } else if (event == "indirect") {
        forbidden(5, "perf_success");
        forbidden(6, "perf_failure");
        double t_xy = load_trust(required(7, "trust_in_teammate"),
                                 where + ": trust_in_teammate",
                                 &data.clamp_count);
        double t_ya = load_trust(required(8, "teammate_trust"),
                                 where + ": teammate_trust",
                                 &data.clamp_count);
        ev = TrustEvent::indirect(session, t_xy, t_ya, reported);
      } else {
        throw ValidationError(where + ": unknown event '" + event +
                              "' (expected prior, direct, or indirect)");
      }
    } catch (const DomainError& e) {
      throw ValidationError(where + ": " + e.what());
    }

    auto key = std::make_pair(human_id, robot_id);
    auto it = index.find(key);
    if (it == index.end()) {
      if (ev.kind != EventKind::Prior) {
        throw ValidationError(where + ": first row for (" + human_id + ", " +
                              robot_id + ") must be the prior rating");
      }
      index.emplace(key, data.entries.size());
      TrajectoryEntry entry;
      entry.team_id = team_id;
      entry.trajectory.human_id = human_id;
      entry.trajectory.robot_id = robot_id;
      entry.trajectory.events.push_back(ev);
      data.entries.push_back(std::move(entry));
    } else {
      TrajectoryEntry& entry = data.entries[it->second];
      if (entry.team_id != team_id) {
        throw ValidationError(where + ": (" + human_id + ", " + robot_id +
                              ") appears under two team ids ('" +
                              entry.team_id + "' and '" + team_id + "')");
      }
      if (ev.kind == EventKind::Prior) {
        throw ValidationError(where + ": duplicate prior for (" + human_id +
                              ", " + robot_id + ")");
      }
      if (session <= entry.trajectory.events.back().session) {
        throw ValidationError(
            where + ": session indices must strictly increase for (" +
            human_id + ", " + robot_id + ")");
      }
      entry.trajectory.events.push_back(ev);
    }
  }

  if (data.entries.empty()) {
    throw ValidationError(path + ": no data rows");
  }
  for (const TrajectoryEntry& entry : data.entries) {
    entry.trajectory.validate();
  }
  return data;
}

void save_trajectories(const std::vector<TrajectoryEntry>& entries,
                       const std::string& path) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryEntry& entry : entries) {
    require_clean_id(entry.team_id, "team_id");
    require_clean_id(entry.trajectory.human_id, "human_id");
    require_clean_id(entry.trajectory.robot_id, "robot_id");
    for (const TrustEvent& e : entry.trajectory.events) {
      out << entry.team_id << ',' << entry.trajectory.human_id << ','
          << entry.trajectory.robot_id << ',' << e.session << ',';
      switch (e.kind) {
        case EventKind::Prior:
          out << "prior,,,,";
          break;
        case EventKind::Direct:
          out << "direct," << double_to_string(e.perf_success) << ','
              << double_to_string(e.perf_failure) << ",,";
          break;
        case EventKind::Indirect:
          out << "indirect,,," << double_to_string(e.trust_in_recommender)
              << ',' << double_to_string(e.recommender_trust);
          break;
      }
      out << ',';
      if (e.reported_trust) out << double_to_string(*e.reported_trust);
      out << '\n';
    }
  }
  write_text_file_atomic(path, out.str());
}

std::vector<ParamsRecord> load_fit_results(const std::string& path) {
  std::ifstream in = open_input(path);
  read_header_line(in, path, kParamsHeader);
  std::vector<ParamsRecord> records;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::string where = path + ": line " + std::to_string(line_no);
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 12) {
      throw ValidationError(where + ": expected 12 fields, got " +
                            std::to_string(f.size()));
    }
    ParamsRecord r;
    r.human_id = f[0];
    r.robot_id = f[1];
    if (r.human_id.empty() || r.robot_id.empty()) {
      throw ValidationError(where + ": human_id and robot_id are required");
    }
    r.alpha0 = parse_double(f[2], where + ": alpha0");
    r.beta0 = parse_double(f[3], where + ": beta0");
    r.s = parse_double(f[4], where + ": s");
    r.f = parse_double(f[5], where + ": f");
    r.s_hat = parse_double(f[6], where + ": s_hat");
    r.f_hat = parse_double(f[7], where + ": f_hat");
    r.log_likelihood = parse_double(f[8], where + ": log_likelihood");
    r.mean_fit_error = parse_double(f[9], where + ": mean_fit_error");
    if (f[10] == "true") {
      r.converged = true;
    } else if (f[10] == "false") {
      r.converged = false;
    } else {
      throw ValidationError(where + ": converged must be true or false");
    }
    r.iterations = parse_int(f[11], where + ": iterations");
    try {
      TipParams(r.alpha0, r.beta0, r.s, r.f, r.s_hat, r.f_hat);
    } catch (const DomainError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

void save_fit_results(const std::vector<ParamsRecord>& records,
                      const std::string& path) {
  std::ostringstream out;
  out << kParamsHeader << '\n';
  for (const ParamsRecord& r : records) {
    require_clean_id(r.human_id, "human_id");
    require_clean_id(r.robot_id, "robot_id");
    out << r.human_id << ',' << r.robot_id << ','
        << double_to_string(r.alpha0) << ',' << double_to_string(r.beta0)
        << ',' << double_to_string(r.s) << ',' << double_to_string(r.f) << ','
        << double_to_string(r.s_hat) << ',' << double_to_string(r.f_hat)
        << ',' << double_to_string(r.log_likelihood) << ','
        << double_to_string(r.mean_fit_error) << ','
        << (r.converged ? "true" : "false") << ',' << r.iterations << '\n';
  }
  write_text_file_atomic(path, out.str());
}

std::vector<SessionLogRow> load_session_logs(const std::string& path) {
  std::ifstream in = open_input(path);
  read_header_line(in, path, kSessionLogHeader);
  std::vector<SessionLogRow> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::string where = path + ": line " + std::to_string(line_no);
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 10) {
      throw ValidationError(where + ": expected 10 fields, got " +
                            std::to_string(f.size()));
    }
    SessionLogRow r;
    r.session = parse_int(f[0], where + ": session");
    r.human_id = f[1];
    r.robot_id = f[2];
    r.role = f[3];
    if (r.role != "prior" && r.role != "direct" && r.role != "indirect") {
      throw ValidationError(where + ": unknown role '" + r.role + "'");
    }
    if (r.role == "direct") {
      r.correct_count = parse_int(f[4], where + ": correct_count");
      r.n_locations = parse_int(f[5], where + ": n_locations");
      if (r.correct_count < 0 || r.correct_count > r.n_locations) {
        throw ValidationError(where +
                              ": correct_count outside [0, n_locations]");
      }
    }
    r.reported_trust = parse_double(f[6], where + ": reported_trust");
    if (r.role == "indirect") {
      r.trust_in_teammate =
          parse_double(f[7], where + ": trust_in_teammate");
      r.recommender_id = f[8];
      r.recommender_report =
          parse_double(f[9], where + ": recommender_report");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_session_logs(const std::vector<SessionLogRow>& rows,
                       const std::string& path) {
  std::ostringstream out;
  out << kSessionLogHeader << '\n';
  for (const SessionLogRow& r : rows) {
    require_clean_id(r.human_id, "human_id");
    require_clean_id(r.robot_id, "robot_id");
    require_clean_id(r.recommender_id, "recommender_id");
    out << r.session << ',' << r.human_id << ',' << r.robot_id << ','
        << r.role << ',';
    if (r.role == "direct") {
      out << r.correct_count << ',' << r.n_locations;
    } else {
      out << ',';
    }
    out << ',' << double_to_string(r.reported_trust) << ',';
    if (r.role == "indirect") {
      out << double_to_string(r.trust_in_teammate) << ',' << r.recommender_id
          << ',' << double_to_string(r.recommender_report);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  write_text_file_atomic(path, out.str());
}

namespace {

std::string trim(const std::string& s) {
  size_t first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  size_t last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

HumanSpec* find_human(ExperimentConfig& config, const std::string& id) {
  for (HumanSpec& h : config.humans) {
    if (h.id == id) return &h;
  }
  return nullptr;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in = open_input(path);
  ExperimentConfig config;
  config.humans.clear();

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = path + ": line " + std::to_string(line_no);

    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(where + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError(where + ": expected 'key = value'");
    }

    if (key == "n_sessions") {
      config.n_sessions = parse_int(value, where + ": n_sessions");
    } else if (key == "n_locations") {
      config.n_locations = parse_int(value, where + ": n_locations");
    } else if (key == "seed") {
      unsigned long long seed = 0;
      auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ValidationError(where + ": seed must be a nonnegative integer");
      }
      config.seed = seed;
    } else if (key == "assignment_rule") {
      if (value == "random_each_session") {
        config.assignment_rule = AssignmentRule::RandomEachSession;
      } else if (value == "fixed") {
        config.assignment_rule = AssignmentRule::Fixed;
      } else if (value == "alternating") {
        config.assignment_rule = AssignmentRule::Alternating;
      } else {
        throw ValidationError(where + ": unknown assignment_rule '" + value +
                              "'");
      }
    } else if (key == "robots") {
      config.robot_accuracies.clear();
      for (const std::string& tok : split_ws(value)) {
        size_t colon = tok.find(':');
        if (colon == std::string::npos || colon == 0 ||
            colon == tok.size() - 1) {
          throw ValidationError(where + ": robot entries take the form " +
                                "id:accuracy, got '" + tok + "'");
        }
        config.robot_accuracies.emplace_back(
            tok.substr(0, colon),
            parse_double(tok.substr(colon + 1), where + ": robot accuracy"));
      }
    } else if (key == "humans") {
      for (const std::string& id : split_ws(value)) {
        if (find_human(config, id)) {
          throw ValidationError(where + ": duplicate human id " + id);
        }
        HumanSpec spec;
        spec.id = id;
        config.humans.push_back(std::move(spec));
      }
    } else if (key.find('.') != std::string::npos) {
      size_t dot = key.find('.');
      std::string human_id = key.substr(0, dot);
      std::string sub = key.substr(dot + 1);
      HumanSpec* human = find_human(config, human_id);
      if (!human) {
        throw ValidationError(where + ": human '" + human_id +
                              "' not declared (add it to the humans line " +
                              "before its settings)");
      }
      if (sub == "teammate_trust") {
        human->teammate_trust.clear();
        for (const std::string& tok : split_ws(value)) {
          human->teammate_trust.push_back(
              parse_double(tok, where + ": teammate_trust"));
        }
      } else if (sub.rfind("params.", 0) == 0) {
        std::string robot_id = sub.substr(7);
        std::vector<std::string> toks = split_ws(value);
        if (toks.size() != 6) {
          throw ValidationError(where + ": params lines take 6 values " +
                                "(alpha0 beta0 s f s_hat f_hat)");
        }
        double v[6];
        for (int i = 0; i < 6; ++i) {
          v[i] = parse_double(toks[i], where + ": params");
        }
        try {
          human->params_by_robot.emplace_back(
              robot_id, TipParams(v[0], v[1], v[2], v[3], v[4], v[5]));
        } catch (const DomainError& e) {
          throw ValidationError(where + ": " + e.what());
        }
      } else {
        throw ValidationError(where + ": unknown key '" + key + "'");
      }
    } else {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }

  config.validate_and_fill();
  return config;
}

std::string format_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "n_sessions = " << config.n_sessions << '\n';
  out << "n_locations = " << config.n_locations << '\n';
  out << "seed = " << config.seed << '\n';
  out << "assignment_rule = ";
  switch (config.assignment_rule) {
    case AssignmentRule::RandomEachSession:
      out << "random_each_session";
      break;
    case AssignmentRule::Fixed:
      out << "fixed";
      break;
    case AssignmentRule::Alternating:
      out << "alternating";
      break;
  }
  out << '\n';
  out << "robots =";
  for (const auto& [id, acc] : config.robot_accuracies) {
    out << ' ' << id << ':' << double_to_string(acc);
  }
  out << '\n';
  out << "humans =";
  for (const HumanSpec& h : config.humans) out << ' ' << h.id;
  out << '\n';
  for (const HumanSpec& h : config.humans) {
    out << h.id << ".teammate_trust =";
    for (double v : h.teammate_trust) out << ' ' << double_to_string(v);
    out << '\n';
    for (const auto& [robot_id, p] : h.params_by_robot) {
      out << h.id << ".params." << robot_id << " = "
          << double_to_string(p.alpha0) << ' ' << double_to_string(p.beta0)
          << ' ' << double_to_string(p.s) << ' ' << double_to_string(p.f)
          << ' ' << double_to_string(p.s_hat) << ' '
          << double_to_string(p.f_hat) << '\n';
    }
  }
  return out.str();
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  write_text_file_atomic(path, format_config(config));
}

}  // namespace tip
