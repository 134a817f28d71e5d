#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "phunmix/instance_json.hpp"
#include "phunmix/registry.hpp"

namespace phunmix {

/// Experiment grid: every (M, K) cell crossed with every SNR point, each
/// run for `trials` independently seeded instances handed to every solver.
struct SweepConfig {
  std::vector<std::pair<Index, Index>> grid;  // (M, K) cells
  std::vector<double> snr_db_list;            // +inf encodes "noiseless"
  int trials = 1000;
  std::vector<std::string> solvers;
  std::uint64_t master_seed = 0;
  std::string output_path;
  SolverOptions solver_options;
};

struct ReportRow {
  Index m = 0;
  Index k = 0;
  double snr_db = 0.0;
  std::string solver;
  int trial_index = 0;
  double relative_error = 0.0;
  double residual = 0.0;
  bool exact = false;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

inline void validate_sweep_config(const SweepConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("sweep config: empty grid");
  for (const auto& [m, k] : cfg.grid)
    if (m < 1 || k < 1) throw std::invalid_argument("sweep config: grid cells need M, K >= 1");
  if (cfg.snr_db_list.empty()) throw std::invalid_argument("sweep config: empty snr list");
  if (cfg.trials < 1) throw std::invalid_argument("sweep config: trials must be >= 1");
  if (cfg.solvers.empty()) throw std::invalid_argument("sweep config: no solvers");
  for (const std::string& name : cfg.solvers) {
    if (!is_valid_solver(name))
      throw std::invalid_argument("sweep config: unknown solver '" + name + "'");
    if ((name == "mwf" || name == "nmwf" || name == "nmwf+") && !cfg.solver_options.sigma_n) {
      for (double snr : cfg.snr_db_list)
        if (snr == kNoiselessSnr)
          throw std::invalid_argument("sweep config: '" + name +
                                      "' needs sigma_n > 0 and cannot run noiseless cells");
    }
  }
}

/// Trial seed = master folded with M, K, the SNR bit pattern, and the trial
/// index, one mix_seed round each. Documented in the README.
inline std::uint64_t trial_seed(std::uint64_t master, Index m, Index k, double snr_db,
                                int trial) {
  std::uint64_t h = mix_seed(master, static_cast<std::uint64_t>(m));
  h = mix_seed(h, static_cast<std::uint64_t>(k));
  h = mix_seed(h, seed_bits(snr_db));
  return mix_seed(h, static_cast<std::uint64_t>(trial));
}

namespace detail {

// FNV-1a, used to give each solver its own draw stream within a trial.
inline std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Runs one trial (fixed instance) through every configured solver.
inline std::vector<ReportRow> run_trial(const SweepConfig& cfg, Index m, Index k, double snr_db,
                                        int trial) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, m, k, snr_db, trial);
  GenerationSpec gen;
  gen.m = m;
  gen.k = k;
  gen.snr_db = snr_db;
  gen.seed = seed;
  const Instance inst = generate_instance(gen);

  std::vector<ReportRow> rows;
  rows.reserve(cfg.solvers.size());
  for (const std::string& name : cfg.solvers) {
    SplitMix64 rng(mix_seed(seed, detail::name_hash(name)));
    const auto start = std::chrono::steady_clock::now();
    const SolverResult res = solve_by_name(name, inst, rng, cfg.solver_options);
    const auto stop = std::chrono::steady_clock::now();

    ReportRow row;
    row.m = m;
    row.k = k;
    row.snr_db = snr_db;
    row.solver = name;
    row.trial_index = trial;
    row.relative_error = relative_error(res.estimate, *inst.ground_truth);
    row.residual = residual(inst, res.estimate);
    row.exact = row.relative_error < kExactThreshold;
    row.iterations = res.iterations;
    row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    row.seed = seed;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Full sweep over the config grid. Tasks fan out over `threads` workers;
/// every row is a pure function of the master seed, and rows are sorted by
/// (M, K, snr, solver, trial) before returning, so the output is identical
/// for any thread count.
inline std::vector<ReportRow> run_sweep(const SweepConfig& cfg, int threads = 1) {
  validate_sweep_config(cfg);
  struct Task {
    Index m, k;
    double snr;
    int trial;
  };
  std::vector<Task> tasks;
  for (const auto& [m, k] : cfg.grid)
    for (double snr : cfg.snr_db_list)
      for (int t = 0; t < cfg.trials; ++t) tasks.push_back({m, k, snr, t});

  std::vector<std::vector<ReportRow>> per_task(tasks.size());
  const int workers = std::max(1, threads);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          const Task& t = tasks[i];
          per_task[i] = run_trial(cfg, t.m, t.k, t.snr, t.trial);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          error_message = e.what();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("sweep failed: " + error_message);

  std::vector<ReportRow> rows;
  rows.reserve(tasks.size() * cfg.solvers.size());
  for (std::vector<ReportRow>& chunk : per_task)
    for (ReportRow& row : chunk) rows.push_back(std::move(row));
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.m, a.k, a.snr_db, a.solver, a.trial_index) <
           std::tie(b.m, b.k, b.snr_db, b.solver, b.trial_index);
  });
  return rows;
}

struct SummaryRow {
  Index m = 0;
  Index k = 0;
  double snr_db = 0.0;
  std::string solver;
  int trials = 0;
  double mean_relative_error = 0.0;
  double median_relative_error = 0.0;
  double exact_fraction = 0.0;
  double mean_iterations = 0.0;
  double mean_wall_time_ms = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  std::map<std::tuple<Index, Index, double, std::string>, std::vector<const ReportRow*>> groups;
  for (const ReportRow& row : rows)
    groups[{row.m, row.k, row.snr_db, row.solver}].push_back(&row);

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    SummaryRow s;
    std::tie(s.m, s.k, s.snr_db, s.solver) = key;
    s.trials = static_cast<int>(members.size());
    std::vector<double> errs;
    errs.reserve(members.size());
    for (const ReportRow* r : members) {
      errs.push_back(r->relative_error);
      s.mean_relative_error += r->relative_error;
      s.exact_fraction += r->exact ? 1.0 : 0.0;
      s.mean_iterations += r->iterations;
      s.mean_wall_time_ms += r->wall_time_ms;
    }
    const double n = static_cast<double>(members.size());
    s.mean_relative_error /= n;
    s.exact_fraction /= n;
    s.mean_iterations /= n;
    s.mean_wall_time_ms /= n;
    std::sort(errs.begin(), errs.end());
    s.median_relative_error = errs.size() % 2 == 1
                                  ? errs[errs.size() / 2]
                                  : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf" || s == "noiseless") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "m,k,snr_db,solver,trial_index,relative_error,residual,exact,iterations,wall_time_ms,seed";

/// Serializes rows in the declared column order, floats at 17 significant
/// digits. The wall_time_ms column is written as 0: measured timings are
/// not reproducible and the CSV is the byte-stable results contract (they
/// are available in the JSON report instead).
inline std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ReportRow& row : rows) {
    out += std::to_string(row.m);
    out += ',';
    out += std::to_string(row.k);
    out += ',';
    out += detail::format_double(row.snr_db);
    out += ',';
    out += row.solver;
    out += ',';
    out += std::to_string(row.trial_index);
    out += ',';
    out += detail::format_double(row.relative_error);
    out += ',';
    out += detail::format_double(row.residual);
    out += ',';
    out += row.exact ? "true" : "false";
    out += ',';
    out += std::to_string(row.iterations);
    out += ",0,";
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

inline std::vector<ReportRow> rows_from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || detail::trim(line) != kCsvHeader)
    throw std::runtime_error("csv: missing or unexpected header");
  std::vector<ReportRow> rows;
  while (std::getline(ss, line)) {
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != 11) throw std::runtime_error("csv: malformed row: " + line);
    ReportRow row;
    row.m = std::stol(f[0]);
    row.k = std::stol(f[1]);
    row.snr_db = detail::parse_double(f[2]);
    row.solver = f[3];
    row.trial_index = std::stoi(f[4]);
    row.relative_error = detail::parse_double(f[5]);
    row.residual = detail::parse_double(f[6]);
    row.exact = f[7] == "true";
    row.iterations = std::stoi(f[8]);
    row.wall_time_ms = detail::parse_double(f[9]);
    row.seed = std::stoull(f[10]);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Flat key = value config, '#' comments, comma-separated lists, grid cells
/// as MxK tokens:
///   grid = 2x2, 3x3
///   snr_db_list = 60, noiseless
///   trials = 100
///   solvers = mwf, nmwf, phunlift
///   master_seed = 42
///   output_path = sweep.csv
inline SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig cfg;
  cfg.trials = 1000;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "grid") {
      for (const std::string& cell : detail::split(value, ',')) {
        const auto x = cell.find('x');
        if (x == std::string::npos)
          throw std::invalid_argument("config: grid cells look like MxK, got '" + cell + "'");
        cfg.grid.emplace_back(std::stol(cell.substr(0, x)), std::stol(cell.substr(x + 1)));
      }
    } else if (key == "snr_db_list") {
      for (const std::string& item : detail::split(value, ','))
        cfg.snr_db_list.push_back(detail::parse_double(item));
    } else if (key == "trials") {
      cfg.trials = std::stoi(value);
    } else if (key == "solvers") {
      cfg.solvers = detail::split(value, ',');
    } else if (key == "master_seed") {
      cfg.master_seed = std::stoull(value);
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "alt_tol") {
      cfg.solver_options.alt.tol = std::stod(value);
    } else if (key == "alt_max_iter") {
      cfg.solver_options.alt.max_iter = std::stoi(value);
    } else if (key == "bcd_tol") {
      cfg.solver_options.bcd.tol = std::stod(value);
    } else if (key == "bcd_max_iter") {
      cfg.solver_options.bcd.max_iter = std::stoi(value);
    } else if (key == "bcd_nu") {
      cfg.solver_options.bcd.nu = std::stod(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  validate_sweep_config(cfg);
  return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

/// JSON report with measured timings and per-group summaries (the CSV
/// deliberately omits timings; see rows_to_csv).
inline nlohmann::json report_json(const SweepConfig& cfg, const std::vector<ReportRow>& rows) {
  nlohmann::json j;
  j["master_seed"] = cfg.master_seed;
  j["trials"] = cfg.trials;
  j["solvers"] = cfg.solvers;
  nlohmann::json jrows = nlohmann::json::array();
  for (const ReportRow& row : rows) {
    jrows.push_back({{"m", row.m},
                     {"k", row.k},
                     {"snr_db", detail::format_double(row.snr_db)},
                     {"solver", row.solver},
                     {"trial_index", row.trial_index},
                     {"relative_error", row.relative_error},
                     {"residual", row.residual},
                     {"exact", row.exact},
                     {"iterations", row.iterations},
                     {"wall_time_ms", row.wall_time_ms},
                     {"seed", row.seed}});
  }
  j["rows"] = std::move(jrows);
  nlohmann::json jsum = nlohmann::json::array();
  for (const SummaryRow& s : summarize(rows)) {
    jsum.push_back({{"m", s.m},
                    {"k", s.k},
                    {"snr_db", detail::format_double(s.snr_db)},
                    {"solver", s.solver},
                    {"trials", s.trials},
                    {"mean_relative_error", s.mean_relative_error},
                    {"median_relative_error", s.median_relative_error},
                    {"exact_fraction", s.exact_fraction},
                    {"mean_iterations", s.mean_iterations},
                    {"mean_wall_time_ms", s.mean_wall_time_ms}});
  }
  j["summary"] = std::move(jsum);
  return j;
}

}  // namespace phunmix
