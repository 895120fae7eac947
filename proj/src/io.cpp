#include "platecol/io.hpp"

#include <cstdio>
#include <fstream>

namespace platecol {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return j;
}

std::string bc_kind_name(BcKind k) {
  switch (k) {
    case BcKind::Clamped: return "clamped";
    case BcKind::SimplySupported: return "simply-supported";
    case BcKind::Free: return "free";
  }
  return "clamped";
}

BcKind bc_kind_from(const std::string& s) {
  if (s == "clamped") return BcKind::Clamped;
  if (s == "simply-supported") return BcKind::SimplySupported;
  if (s == "free") return BcKind::Free;
  throw ConfigError("unknown boundary kind \"" + s +
                    "\" (expected clamped, simply-supported or free)");
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: field \"") + key +
                      "\" has the wrong type");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_parameters(const std::filesystem::path& path, const Parameters& p,
                     std::uint64_t seed, const ProblemSpec* problem) {
  ordered_json j;
  j["format"] = "platecol-params-v1";
  j["layers"] = p.arch().layer_sizes();
  j["activation"] = "tanh";
  j["seed"] = seed;
  if (problem != nullptr) j["problem"] = problem_to_json(*problem);
  j["values"] = p.values();
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

Parameters load_parameters(const std::filesystem::path& path,
                           std::optional<ProblemSpec>* problem) {
  const json j = read_json_file(path);
  if (!j.is_object() || j.value("format", "") != "platecol-params-v1")
    throw IoError(path.string() + ": not a platecol parameters file");
  if (j.value("activation", "") != "tanh")
    throw IoError(path.string() + ": unsupported activation tag");
  const auto layers = j.at("layers").get<std::vector<int>>();
  if (layers.size() < 3 || layers.front() != Architecture::kInputDim ||
      layers.back() != Architecture::kOutputDim)
    throw IoError(path.string() + ": malformed architecture header");
  const int width = layers[1];
  for (std::size_t l = 1; l + 1 < layers.size(); ++l)
    if (layers[l] != width)
      throw IoError(path.string() + ": hidden layers must share one width");
  Architecture arch{int(layers.size()) - 2, width};
  if (!arch.valid()) throw IoError(path.string() + ": invalid architecture");
  Parameters p(arch);
  const auto values = j.at("values").get<std::vector<double>>();
  if (int(values.size()) != p.count())
    throw IoError(path.string() + ": value count does not match architecture");
  p.values() = values;
  if (problem != nullptr) {
    problem->reset();
    if (j.contains("problem")) *problem = problem_from_json(j.at("problem"));
  }
  return p;
}

ordered_json problem_to_json(const ProblemSpec& s) {
  ordered_json j;
  j["shape"] =
      s.shape == PlateProblem::Shape::Rectangle ? "rectangle" : "disk";
  if (s.shape == PlateProblem::Shape::Rectangle) {
    j["a"] = s.a;
    j["b"] = s.b;
  } else {
    j["radius"] = s.radius;
  }
  j["material"] = {{"rigidity", s.rigidity},
                   {"poisson", s.poisson},
                   {"thickness", s.thickness}};
  j["load"] = {{"type", s.load_type}, {"value", s.load_value}};
  j["foundation_k"] = s.foundation_k;
  ordered_json bcs = ordered_json::array();
  for (const BcSpec& bc : s.boundary)
    bcs.push_back({{"kind", bc_kind_name(bc.kind)},
                   {"value1", bc.value1},
                   {"value2", bc.value2}});
  j["boundary"] = bcs;
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec s;
  const std::string shape = field_or<std::string>(j, "shape", "rectangle");
  if (shape == "rectangle") {
    s.shape = PlateProblem::Shape::Rectangle;
  } else if (shape == "disk") {
    s.shape = PlateProblem::Shape::Disk;
  } else {
    throw ConfigError("problem: unknown shape \"" + shape + "\"");
  }
  s.a = field_or(j, "a", 1.0);
  s.b = field_or(j, "b", 1.0);
  s.radius = field_or(j, "radius", 1.0);
  if (j.contains("material")) {
    const json& m = j.at("material");
    s.rigidity = field_or(m, "rigidity", 1.0);
    s.poisson = field_or(m, "poisson", 0.3);
    s.thickness = field_or(m, "thickness", 0.1);
  }
  if (j.contains("load")) {
    const json& l = j.at("load");
    s.load_type = field_or<std::string>(l, "type", "uniform");
    s.load_value = field_or(l, "value", 1.0);
  }
  s.foundation_k = field_or(j, "foundation_k", 0.0);
  const int segments =
      s.shape == PlateProblem::Shape::Rectangle ? 4 : 1;
  if (!j.contains("boundary"))
    throw ConfigError("problem: missing required field \"boundary\"");
  const json& bcs = j.at("boundary");
  if (!bcs.is_array() || int(bcs.size()) != segments)
    throw ConfigError("problem: \"boundary\" must list " +
                      std::to_string(segments) + " conditions");
  for (const json& bj : bcs) {
    BcSpec bc;
    if (!bj.contains("kind"))
      throw ConfigError("problem: boundary entry missing \"kind\"");
    bc.kind = bc_kind_from(bj.at("kind").get<std::string>());
    bc.value1 = field_or(bj, "value1", 0.0);
    bc.value2 = field_or(bj, "value2", 0.0);
    s.boundary.push_back(bc);
  }
  return s;
}

void write_history_csv(const std::filesystem::path& path,
                       std::span<const TrainRecord> history) {
  auto out = open_out(path);
  out << "iter,mse_g,mse_gamma1,mse_gamma2,mse_gamma3,total,phase\n";
  for (const TrainRecord& r : history) {
    out << r.iteration << ',' << format_double(r.loss.interior) << ','
        << format_double(r.loss.clamped) << ','
        << format_double(r.loss.simply_supported) << ','
        << format_double(r.loss.free_edge) << ','
        << format_double(r.loss.total()) << ',' << r.phase << '\n';
  }
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: document must be an object");
  RunConfig cfg;

  const bool has_case = j.contains("case");
  const bool has_problem = j.contains("problem");
  if (has_case == has_problem)
    throw ConfigError(
        "config: exactly one of \"case\" and \"problem\" is required");
  cfg.winkler_terms = field_or(j, "winkler_terms", 25);
  if (has_case) {
    const auto name = j.at("case").get<std::string>();
    const auto id = case_from_string(name);
    if (!id) {
      std::string msg = "config: unknown case \"" + name + "\"; valid cases:";
      for (const auto& n : case_names()) msg += " " + n;
      throw ConfigError(msg);
    }
    cfg.benchmark = *id;
    cfg.problem = make_benchmark(*id, cfg.winkler_terms).spec;
  } else {
    cfg.problem = problem_from_json(j.at("problem"));
  }

  if (!j.contains("architecture"))
    throw ConfigError("config: missing required field \"architecture\"");
  {
    const json& a = j.at("architecture");
    cfg.architecture.hidden_layers = field_or(a, "hidden_layers", 3);
    cfg.architecture.neurons = field_or(a, "neurons", 50);
    if (!cfg.architecture.valid())
      throw ConfigError("config: architecture out of range (1-8 hidden "
                        "layers, neurons >= 1)");
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    cfg.n_interior = field_or(s, "n_interior", cfg.n_interior);
    cfg.n_boundary = field_or(s, "n_boundary", cfg.n_boundary);
    cfg.sample_seed = field_or<std::uint64_t>(s, "seed", cfg.sample_seed);
    if (cfg.n_interior <= 0 || cfg.n_boundary <= 0)
      throw ConfigError("config: sampling counts must be positive");
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    TrainConfig& tc = cfg.train;
    tc.max_lbfgs_iters = field_or(t, "max_lbfgs_iters", tc.max_lbfgs_iters);
    tc.lbfgs_history = field_or(t, "lbfgs_history", tc.lbfgs_history);
    tc.lbfgs_gradient_tolerance =
        field_or(t, "lbfgs_gradient_tolerance", tc.lbfgs_gradient_tolerance);
    tc.wolfe_c1 = field_or(t, "wolfe_c1", tc.wolfe_c1);
    tc.wolfe_c2 = field_or(t, "wolfe_c2", tc.wolfe_c2);
    tc.max_line_search = field_or(t, "max_line_search", tc.max_line_search);
    tc.adam_learning_rate =
        field_or(t, "adam_learning_rate", tc.adam_learning_rate);
    tc.adam_beta1 = field_or(t, "adam_beta1", tc.adam_beta1);
    tc.adam_beta2 = field_or(t, "adam_beta2", tc.adam_beta2);
    tc.adam_epsilon = field_or(t, "adam_epsilon", tc.adam_epsilon);
    tc.max_adam_iters = field_or(t, "max_adam_iters", tc.max_adam_iters);
    tc.retry_lbfgs = field_or(t, "retry_lbfgs", tc.retry_lbfgs);
    tc.loss_tolerance = field_or(t, "loss_tolerance", tc.loss_tolerance);
    tc.seed = field_or<std::uint64_t>(t, "seed", tc.seed);
    tc.threads = field_or(t, "threads", tc.threads);
    if (tc.adam_beta1 <= 0.0 || tc.adam_beta1 >= 1.0 || tc.adam_beta2 <= 0.0 ||
        tc.adam_beta2 >= 1.0)
      throw ConfigError("config: adam betas must lie in (0, 1)");
    if (tc.adam_learning_rate <= 0.0 || tc.adam_epsilon <= 0.0 ||
        tc.lbfgs_history <= 0 || tc.max_lbfgs_iters < 0 ||
        tc.max_adam_iters < 0)
      throw ConfigError("config: train parameters must be positive");
  }
  cfg.out_dir = field_or<std::string>(j, "out_dir", cfg.out_dir);
  cfg.lattice = field_or(j, "lattice", cfg.lattice);
  cfg.export_contour = field_or(j, "export_contour", cfg.export_contour);
  if (cfg.lattice < 1) throw ConfigError("config: lattice must be >= 1");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path));
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  if (cfg.benchmark) j["case"] = case_name(*cfg.benchmark);
  j["problem"] = problem_to_json(cfg.problem);
  j["architecture"] = {{"hidden_layers", cfg.architecture.hidden_layers},
                       {"neurons", cfg.architecture.neurons}};
  j["sampling"] = {{"n_interior", cfg.n_interior},
                   {"n_boundary", cfg.n_boundary},
                   {"seed", cfg.sample_seed}};
  const TrainConfig& t = cfg.train;
  j["train"] = {{"max_lbfgs_iters", t.max_lbfgs_iters},
                {"lbfgs_history", t.lbfgs_history},
                {"lbfgs_gradient_tolerance", t.lbfgs_gradient_tolerance},
                {"wolfe_c1", t.wolfe_c1},
                {"wolfe_c2", t.wolfe_c2},
                {"max_line_search", t.max_line_search},
                {"adam_learning_rate", t.adam_learning_rate},
                {"adam_beta1", t.adam_beta1},
                {"adam_beta2", t.adam_beta2},
                {"adam_epsilon", t.adam_epsilon},
                {"max_adam_iters", t.max_adam_iters},
                {"retry_lbfgs", t.retry_lbfgs},
                {"loss_tolerance", t.loss_tolerance},
                {"seed", t.seed},
                {"threads", t.threads}};
  j["winkler_terms"] = cfg.winkler_terms;
  j["out_dir"] = cfg.out_dir;
  j["lattice"] = cfg.lattice;
  j["export_contour"] = cfg.export_contour;
  return j;
}

void write_grid_report_csv(const std::filesystem::path& path,
                           const GridReport& report) {
  auto out = open_out(path);
  out << "case,layers,neurons,center_deflection,max_deflection,rel_l2,"
         "mse_g,mse_gamma1,mse_gamma2,mse_gamma3,total_loss,iterations,"
         "seconds,diverged\n";
  for (const CellResult& c : report.cells) {
    out << report.name << ',' << c.layers << ',' << c.neurons << ','
        << format_double(c.center_deflection) << ','
        << format_double(c.max_deflection) << ',' << format_double(c.rel_l2)
        << ',' << format_double(c.final_loss.interior) << ','
        << format_double(c.final_loss.clamped) << ','
        << format_double(c.final_loss.simply_supported) << ','
        << format_double(c.final_loss.free_edge) << ','
        << format_double(c.final_loss.total()) << ',' << c.iterations << ','
        << format_double(c.seconds) << ',' << (c.diverged ? 1 : 0) << '\n';
  }
}

ordered_json grid_report_json(const GridReport& report) {
  ordered_json j;
  j["case"] = report.name;
  j["sample_seed"] = report.sample_seed;
  ordered_json cells = ordered_json::array();
  for (const CellResult& c : report.cells) {
    cells.push_back({{"layers", c.layers},
                     {"neurons", c.neurons},
                     {"center_deflection", c.center_deflection},
                     {"max_deflection", c.max_deflection},
                     {"rel_l2", c.rel_l2},
                     {"total_loss", c.final_loss.total()},
                     {"iterations", c.iterations},
                     {"seconds", c.seconds},
                     {"diverged", c.diverged}});
  }
  j["cells"] = cells;
  return j;
}

void write_contour_csv(const std::filesystem::path& path,
                       const PlateProblem& problem, const Parameters& params,
                       const std::function<double(double, double)>& oracle,
                       int lattice) {
  auto out = open_out(path);
  const auto pts = evaluation_lattice(problem, lattice, lattice);
  if (oracle) {
    out << "x,y,w_pred,w_exact,abs_err\n";
    for (const Vec2& p : pts) {
      const double wp = forward_scalar(params, p.x, p.y);
      const double we = oracle(p.x, p.y);
      out << format_double(p.x) << ',' << format_double(p.y) << ','
          << format_double(wp) << ',' << format_double(we) << ','
          << format_double(std::abs(wp - we)) << '\n';
    }
  } else {
    out << "x,y,w_pred\n";
    for (const Vec2& p : pts) {
      out << format_double(p.x) << ',' << format_double(p.y) << ','
          << format_double(forward_scalar(params, p.x, p.y)) << '\n';
    }
  }
}

}  // namespace platecol
