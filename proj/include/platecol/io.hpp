#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "platecol/benchmarks.hpp"
#include "platecol/network.hpp"
#include "platecol/optim.hpp"
#include "platecol/plate.hpp"

namespace platecol {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Round-trip decimal formatting used by every CSV and JSON writer.
std::string format_double(double v);

// --- parameters file -------------------------------------------------------
// JSON with an architecture header and the flat value vector:
//   {"format": "platecol-params-v1", "layers": [2, n, ..., 1],
//    "activation": "tanh", "seed": ..., "problem": {...}?, "values": [...]}
void save_parameters(const std::filesystem::path& path, const Parameters& p,
                     std::uint64_t seed,
                     const ProblemSpec* problem = nullptr);
Parameters load_parameters(const std::filesystem::path& path,
                           std::optional<ProblemSpec>* problem = nullptr);

// --- problem spec ----------------------------------------------------------
nlohmann::ordered_json problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const nlohmann::json& j);

// --- loss history ----------------------------------------------------------
void write_history_csv(const std::filesystem::path& path,
                       std::span<const TrainRecord> history);

// --- run configuration ------------------------------------------------------
struct RunConfig {
  std::optional<CaseId> benchmark;  // set when "case" named a benchmark
  ProblemSpec problem;
  Architecture architecture{3, 50};
  int n_interior = 1000;
  int n_boundary = 400;
  std::uint64_t sample_seed = 7;
  int winkler_terms = 25;
  TrainConfig train;
  std::string out_dir = "out";
  int lattice = 101;
  bool export_contour = false;
};

// Parses a config document, applying defaults; throws ConfigError naming the
// offending field. Exactly one of "case" and "problem" must be present.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Full echo of the effective configuration, defaults included.
nlohmann::ordered_json config_echo(const RunConfig& cfg);

// --- reports ----------------------------------------------------------------
void write_grid_report_csv(const std::filesystem::path& path,
                           const GridReport& report);
nlohmann::ordered_json grid_report_json(const GridReport& report);

// x,y,w_pred[,w_exact,abs_err] on an evaluation lattice.
void write_contour_csv(const std::filesystem::path& path,
                       const PlateProblem& problem, const Parameters& params,
                       const std::function<double(double, double)>& oracle,
                       int lattice);

}  // namespace platecol
