#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platecol/benchmarks.hpp"
#include "platecol/io.hpp"
#include "platecol/loss.hpp"
#include "platecol/optim.hpp"
#include "platecol/sampling.hpp"

namespace fs = std::filesystem;
using namespace platecol;

namespace {

// 0 success, 2 bad config, 3 numeric divergence, 4 I/O failure
enum ExitCode { kOk = 0, kConfigError = 2, kDiverged = 3, kIoError = 4 };

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    try {
      out.push_back(std::stoi(s.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse \"" + s + "\"");
    }
    pos = next + 1;
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

// "A[xB]" with comma lists on both sides
std::pair<std::vector<int>, std::vector<int>> parse_grid(const std::string& s,
                                                         const char* what) {
  const std::size_t x = s.find('x');
  if (x == std::string::npos) {
    const auto v = parse_int_list(s, what);
    return {v, v};
  }
  return {parse_int_list(s.substr(0, x), what),
          parse_int_list(s.substr(x + 1), what)};
}

nlohmann::ordered_json loss_json(const LossBreakdown& l) {
  return {{"mse_g", l.interior},
          {"mse_gamma1", l.clamped},
          {"mse_gamma2", l.simply_supported},
          {"mse_gamma3", l.free_edge},
          {"total", l.total()}};
}

int cmd_train(const std::string& config_path,
              const std::optional<std::uint64_t>& seed_override,
              const std::optional<std::string>& out_override, bool quiet) {
  const auto t_start = std::chrono::steady_clock::now();
  RunConfig cfg = load_run_config(config_path);
  if (seed_override) cfg.train.seed = *seed_override;
  if (out_override) cfg.out_dir = *out_override;

  std::optional<BenchmarkCase> bench;
  if (cfg.benchmark) bench = make_benchmark(*cfg.benchmark, cfg.winkler_terms);
  const PlateProblem problem = bench ? bench->problem : cfg.problem.build();

  const CollocationSet points =
      sample_problem(problem, cfg.n_interior, cfg.n_boundary, cfg.sample_seed);
  if (!quiet)
    std::printf("training %d x %d network on %zu interior + %zu boundary "
                "points (seed %llu)\n",
                cfg.architecture.hidden_layers, cfg.architecture.neurons,
                points.interior.size(), points.boundary.size(),
                (unsigned long long)cfg.train.seed);

  const auto t_train0 = std::chrono::steady_clock::now();
  TrainResult result = train(problem, points, cfg.architecture, cfg.train);
  const auto t_train1 = std::chrono::steady_clock::now();
  if (!quiet)
    std::printf("finished: %s, %d iterations, final loss %.6e\n",
                to_string(result.lbfgs_status), result.iterations,
                result.final_loss.total());

  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  save_parameters(dir / "params.json", result.params, cfg.train.seed,
                  &cfg.problem);
  write_history_csv(dir / "loss_history.csv", result.history);

  nlohmann::ordered_json summary;
  summary["config"] = config_echo(cfg);
  nlohmann::ordered_json res;
  res["status"] = result.diverged ? "diverged" : to_string(result.lbfgs_status);
  res["iterations"] = result.iterations;
  res["final_loss"] = loss_json(result.final_loss);
  const Vec2 c = problem.center();
  res["center"] = {{"x", c.x},
                   {"y", c.y},
                   {"w", forward_scalar(result.params, c.x, c.y)}};
  const auto lattice = evaluation_lattice(problem, cfg.lattice, cfg.lattice);
  double max_w = 0.0;
  std::vector<double> pred(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    pred[i] = forward_scalar(result.params, lattice[i].x, lattice[i].y);
    max_w = std::max(max_w, std::abs(pred[i]));
  }
  res["max_abs_deflection"] = max_w;
  if (bench) {
    std::vector<double> exact(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i)
      exact[i] = bench->oracle(lattice[i].x, lattice[i].y);
    res["relative_l2"] = relative_l2(pred, exact);
    res["center_reference"] = bench->center_reference;
  }
  summary["result"] = res;
  nlohmann::ordered_json artifacts;
  artifacts["parameters"] = "params.json";
  artifacts["history"] = "loss_history.csv";
  if (cfg.export_contour) {
    write_contour_csv(dir / "contour.csv", problem, result.params,
                      bench ? bench->oracle : nullptr, cfg.lattice);
    artifacts["contour"] = "contour.csv";
  }
  summary["artifacts"] = artifacts;
  const auto t_end = std::chrono::steady_clock::now();
  summary["timing"] = {
      {"train_seconds", std::chrono::duration<double>(t_train1 - t_train0).count()},
      {"total_seconds", std::chrono::duration<double>(t_end - t_start).count()}};
  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw IoError("cannot write summary.json");
    out << summary.dump(1) << '\n';
  }
  return result.diverged ? kDiverged : kOk;
}

int cmd_benchmark(const std::string& case_name_arg, const std::string& grid,
                  const std::string& out_dir, std::uint64_t seed,
                  int n_interior, int n_boundary, int max_iters,
                  double loss_tol, int lattice, bool contours, bool quiet) {
  const auto id = case_from_string(case_name_arg);
  if (!id) {
    std::string msg = "unknown case \"" + case_name_arg + "\"; valid cases:";
    for (const auto& n : case_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  const BenchmarkCase bench = make_benchmark(*id);
  auto [layer_counts, widths] = parse_grid(grid, "--grid");

  TrainConfig cfg;
  cfg.max_lbfgs_iters = max_iters;
  cfg.loss_tolerance = loss_tol;
  cfg.seed = seed;
  if (!quiet)
    std::printf("benchmark %s: %zu x %zu grid, %d interior + %d boundary "
                "points\n",
                bench.name.c_str(), layer_counts.size(), widths.size(),
                n_interior, n_boundary);
  const GridReport report =
      run_benchmark(bench, layer_counts, widths, cfg, n_interior, n_boundary,
                    /*sample_seed=*/seed, lattice, !quiet);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_grid_report_csv(dir / "report.csv", report);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw IoError("cannot write report.json");
    out << grid_report_json(report).dump(1) << '\n';
  }
  if (contours) {
    for (const CellResult& cell : report.cells) {
      char name[64];
      std::snprintf(name, sizeof(name), "contour_%dx%d.csv", cell.layers,
                    cell.neurons);
      write_contour_csv(dir / name, bench.problem, cell.params, bench.oracle,
                        lattice);
    }
  }
  bool any_diverged = false;
  for (const CellResult& cell : report.cells) any_diverged |= cell.diverged;
  return any_diverged ? kDiverged : kOk;
}

int cmd_evaluate(const std::string& params_path, const std::string& grid,
                 const std::string& fields, const std::string& out_path) {
  std::optional<ProblemSpec> spec;
  const Parameters params = load_parameters(params_path, &spec);
  const PlateProblem problem = spec ? spec->build() : PlateProblem{};
  auto [nx, ny] = parse_grid(grid, "--grid");
  if (nx.size() != 1 || ny.size() != 1)
    throw ConfigError("--grid: expected NxM with single counts");

  std::vector<std::string> cols;
  {
    std::size_t pos = 0;
    while (pos < fields.size()) {
      std::size_t next = fields.find(',', pos);
      if (next == std::string::npos) next = fields.size();
      cols.push_back(fields.substr(pos, next - pos));
      pos = next + 1;
    }
  }
  const std::vector<std::string> known = {"w", "mx", "my", "mxy", "qx", "qy"};
  for (const auto& c : cols)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw ConfigError("--fields: unknown field \"" + c +
                        "\" (valid: w,mx,my,mxy,qx,qy)");
  const bool needs_jet =
      cols.size() > 1 || (cols.size() == 1 && cols[0] != "w");

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open for writing: " + out_path);
  out << "x,y";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (const Vec2& p : evaluation_lattice(problem, nx[0], ny[0])) {
    out << format_double(p.x) << ',' << format_double(p.y);
    if (needs_jet) {
      const Jet j = forward_jet(params, p.x, p.y);
      const PlateState st = plate_state(j, problem.material);
      for (const auto& c : cols) {
        double v = st.w;
        if (c == "mx") v = st.mx;
        else if (c == "my") v = st.my;
        else if (c == "mxy") v = st.mxy;
        else if (c == "qx") v = st.qx;
        else if (c == "qy") v = st.qy;
        out << ',' << format_double(v);
      }
    } else {
      out << ',' << format_double(forward_scalar(params, p.x, p.y));
    }
    out << '\n';
  }
  return kOk;
}

int cmd_export_points(const std::string& case_name_arg,
                      const std::string& config_path, int n_interior,
                      int n_boundary, std::uint64_t seed,
                      const std::string& out_path) {
  PlateProblem problem;
  if (!case_name_arg.empty()) {
    const auto id = case_from_string(case_name_arg);
    if (!id) {
      std::string msg = "unknown case \"" + case_name_arg + "\"; valid cases:";
      for (const auto& n : case_names()) msg += " " + n;
      throw ConfigError(msg);
    }
    problem = make_benchmark(*id).problem;
  } else if (!config_path.empty()) {
    const RunConfig cfg = load_run_config(config_path);
    problem = cfg.problem.build();
  } else {
    throw ConfigError("export-points: need --case or --config");
  }
  const CollocationSet set =
      sample_problem(problem, n_interior, n_boundary, seed);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open for writing: " + out_path);
  write_points_csv(out, set);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep collocation solver for Kirchhoff plate bending"};
  app.require_subcommand(1);
  std::function<int()> action;

  // train
  {
    auto* sub = app.add_subcommand(
        "train", "train a deflection network from a JSON config");
    auto config = std::make_shared<std::string>();
    auto seed = std::make_shared<std::optional<std::uint64_t>>();
    auto out_dir = std::make_shared<std::optional<std::string>>();
    auto quiet = std::make_shared<bool>(false);
    sub->add_option("--config", *config, "JSON run configuration")->required();
    sub->add_option("--seed", *seed, "override the training seed");
    sub->add_option("--out-dir", *out_dir, "override the output directory");
    sub->add_flag("--quiet", *quiet, "suppress progress output");
    sub->callback([=]() {
      action = [=]() { return cmd_train(*config, *seed, *out_dir, *quiet); };
    });
  }
  // benchmark
  {
    auto* sub = app.add_subcommand(
        "benchmark", "train a layers x neurons grid on a named case");
    auto case_id = std::make_shared<std::string>();
    auto grid = std::make_shared<std::string>("1,2,3x20,40,60");
    auto out_dir = std::make_shared<std::string>("benchmark-out");
    auto seed = std::make_shared<std::uint64_t>(7);
    auto interior = std::make_shared<int>(1000);
    auto boundary = std::make_shared<int>(400);
    auto max_iters = std::make_shared<int>(2000);
    auto loss_tol = std::make_shared<double>(1e-10);
    auto lattice = std::make_shared<int>(101);
    auto contours = std::make_shared<bool>(false);
    auto quiet = std::make_shared<bool>(false);
    sub->add_option("--case", *case_id,
                    "ss-square | clamped-square | clamped-circular | winkler")
        ->required();
    sub->add_option("--grid", *grid, "layer list x neuron list");
    sub->add_option("--out-dir", *out_dir, "output directory");
    sub->add_option("--seed", *seed, "base seed");
    sub->add_option("--interior", *interior, "interior collocation points");
    sub->add_option("--boundary", *boundary, "boundary collocation points");
    sub->add_option("--max-iters", *max_iters, "L-BFGS iteration cap per cell");
    sub->add_option("--loss-tol", *loss_tol, "stop when total loss <= tol");
    sub->add_option("--lattice", *lattice, "evaluation lattice resolution");
    sub->add_flag("--contours", *contours, "write per-cell contour CSVs");
    sub->add_flag("--quiet", *quiet, "suppress progress output");
    sub->callback([=]() {
      action = [=]() {
        return cmd_benchmark(*case_id, *grid, *out_dir, *seed, *interior,
                             *boundary, *max_iters, *loss_tol, *lattice,
                             *contours, *quiet);
      };
    });
  }
  // evaluate
  {
    auto* sub = app.add_subcommand(
        "evaluate", "evaluate a trained network on a lattice");
    auto params = std::make_shared<std::string>();
    auto grid = std::make_shared<std::string>("101x101");
    auto fields = std::make_shared<std::string>("w");
    auto out = std::make_shared<std::string>("evaluation.csv");
    sub->add_option("--params", *params, "parameters file")->required();
    sub->add_option("--grid", *grid, "lattice size NxM");
    sub->add_option("--fields", *fields,
                    "comma list from w,mx,my,mxy,qx,qy");
    sub->add_option("--out", *out, "output CSV path");
    sub->callback([=]() {
      action = [=]() { return cmd_evaluate(*params, *grid, *fields, *out); };
    });
  }
  // export-points
  {
    auto* sub = app.add_subcommand(
        "export-points", "sample a collocation set and write it as CSV");
    auto case_id = std::make_shared<std::string>();
    auto config = std::make_shared<std::string>();
    auto interior = std::make_shared<int>(1000);
    auto boundary = std::make_shared<int>(400);
    auto seed = std::make_shared<std::uint64_t>(7);
    auto out = std::make_shared<std::string>("points.csv");
    sub->add_option("--case", *case_id, "named benchmark case");
    sub->add_option("--config", *config, "JSON run configuration");
    sub->add_option("--interior", *interior, "interior points");
    sub->add_option("--boundary", *boundary, "boundary points");
    sub->add_option("--seed", *seed, "sampling seed");
    sub->add_option("--out", *out, "output CSV path");
    sub->callback([=]() {
      action = [=]() {
        return cmd_export_points(*case_id, *config, *interior, *boundary,
                                 *seed, *out);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action ? action() : kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kDiverged;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}
