#include "platecol/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "platecol/sampling.hpp"

namespace platecol {

namespace {

constexpr double kPi = std::numbers::pi;

// n-th derivative of sin at phase u: sin, cos, -sin, -cos, ...
double sin_deriv(double u, int n) {
  switch (n % 4) {
    case 0: return std::sin(u);
    case 1: return std::cos(u);
    case 2: return -std::sin(u);
    default: return -std::cos(u);
  }
}

// Separable sine-product mode: amp * sin(fx*x) * sin(fy*y) and its jet.
void add_sine_mode(Jet& out, double x, double y, double amp, double fx,
                   double fy) {
  for (int i = 0; i <= kJetOrder; ++i)
    for (int j = 0; i + j <= kJetOrder; ++j)
      out.c[jet_index(i, j)] += amp * std::pow(fx, i) * std::pow(fy, j) *
                                sin_deriv(fx * x, i) * sin_deriv(fy * y, j);
}

// value of d^n/dt^n of a fixed-coefficient polynomial (c[k] t^k)
double poly_deriv(std::span<const double> c, double t, int n) {
  double r = 0.0;
  for (int k = int(c.size()) - 1; k >= n; --k) {
    double f = c[k];
    for (int d = 0; d < n; ++d) f *= double(k - d);
    r = r * t + f;
  }
  // Horner above walks k downward; powers below n contribute nothing
  return r;
}

// clamped-beam shape functions of the Galerkin series
constexpr double kT1[] = {0, 0, 1, -2, 1};           // t^2 (1-t)^2
constexpr double kT2[] = {0, 0, 0, 0, 1, -2, 1};     // t^4 (1-t)^2
constexpr double kGalerkinC11 = 0.318682766;
constexpr double kGalerkinC12 = 0.038459815;
constexpr double kGalerkinC21 = 0.038459815;
constexpr double kGalerkinC22 = 0.008281438;

double winkler_mode_coeff(int m, int n, double a, double b, double p, double d,
                          double k) {
  const double lam = m * m / (a * a) + n * n / (b * b);
  const double denom =
      kPi * kPi * m * n *
      (kPi * kPi * kPi * kPi * d * lam * lam + k);
  return 16.0 * p / denom;
}

}  // namespace

double oracle_ss_square(double x, double y, double a, double b, double p0,
                        double d) {
  const double inv = 1.0 / (a * a) + 1.0 / (b * b);
  const double amp = p0 / (kPi * kPi * kPi * kPi * d * inv * inv);
  return amp * std::sin(kPi * x / a) * std::sin(kPi * y / b);
}

Jet oracle_ss_square_jet(double x, double y, double a, double b, double p0,
                         double d) {
  const double inv = 1.0 / (a * a) + 1.0 / (b * b);
  const double amp = p0 / (kPi * kPi * kPi * kPi * d * inv * inv);
  Jet w;
  add_sine_mode(w, x, y, amp, kPi / a, kPi / b);
  return w;
}

double oracle_clamped_square(double x, double y, double a, double b, double p,
                             double d) {
  return oracle_clamped_square_jet(x, y, a, b, p, d).value();
}

Jet oracle_clamped_square_jet(double x, double y, double a, double b, double p,
                              double d) {
  const double scale = b * b * b * b * p / d;
  const double xi = x / a;
  const double eta = y / b;
  Jet w;
  for (int i = 0; i <= kJetOrder; ++i) {
    for (int j = 0; i + j <= kJetOrder; ++j) {
      const double cx = 1.0 / std::pow(a, i);
      const double cy = 1.0 / std::pow(b, j);
      const double t1x = poly_deriv(kT1, xi, i), t2x = poly_deriv(kT2, xi, i);
      const double t1y = poly_deriv(kT1, eta, j), t2y = poly_deriv(kT2, eta, j);
      w.c[jet_index(i, j)] =
          scale * cx * cy *
          (kGalerkinC11 * t1x * t1y + kGalerkinC12 * t1x * t2y +
           kGalerkinC21 * t2x * t1y + kGalerkinC22 * t2x * t2y);
    }
  }
  return w;
}

double oracle_clamped_circular(double x, double y, double r, double p,
                               double d) {
  const double u = r * r - x * x - y * y;
  return p * u * u / (64.0 * d);
}

Jet oracle_clamped_circular_jet(double x, double y, double r, double p,
                                double d) {
  const double c = p / (64.0 * d);
  const double u = r * r - x * x - y * y;
  Jet w;
  w.d(0, 0) = c * u * u;
  w.d(1, 0) = -4.0 * c * x * u;
  w.d(0, 1) = -4.0 * c * y * u;
  w.d(2, 0) = -4.0 * c * (u - 2.0 * x * x);
  w.d(0, 2) = -4.0 * c * (u - 2.0 * y * y);
  w.d(1, 1) = 8.0 * c * x * y;
  w.d(3, 0) = 24.0 * c * x;
  w.d(2, 1) = 8.0 * c * y;
  w.d(1, 2) = 8.0 * c * x;
  w.d(0, 3) = 24.0 * c * y;
  w.d(4, 0) = 24.0 * c;
  w.d(2, 2) = 8.0 * c;
  w.d(0, 4) = 24.0 * c;
  return w;
}

double oracle_winkler(double x, double y, double a, double b, double p,
                      double d, double k, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("winkler: n_terms >= 1");
  double w = 0.0;
  for (int i = n_terms - 1; i >= 0; --i) {
    for (int j = n_terms - 1; j >= 0; --j) {
      const int m = 2 * i + 1;
      const int n = 2 * j + 1;
      w += winkler_mode_coeff(m, n, a, b, p, d, k) *
           std::sin(m * kPi * x / a) * std::sin(n * kPi * y / b);
    }
  }
  return w;
}

Jet oracle_winkler_jet(double x, double y, double a, double b, double p,
                       double d, double k, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("winkler: n_terms >= 1");
  Jet w;
  for (int i = 0; i < n_terms; ++i) {
    for (int j = 0; j < n_terms; ++j) {
      const int m = 2 * i + 1;
      const int n = 2 * j + 1;
      add_sine_mode(w, x, y, winkler_mode_coeff(m, n, a, b, p, d, k),
                    m * kPi / a, n * kPi / b);
    }
  }
  return w;
}

double winkler_load_partial(double x, double y, double a, double b, double p,
                            int n_terms) {
  double v = 0.0;
  for (int i = 0; i < n_terms; ++i) {
    for (int j = 0; j < n_terms; ++j) {
      const int m = 2 * i + 1;
      const int n = 2 * j + 1;
      v += 16.0 * p / (kPi * kPi * m * n) * std::sin(m * kPi * x / a) *
           std::sin(n * kPi * y / b);
    }
  }
  return v;
}

double relative_l2(std::span<const double> predicted,
                   std::span<const double> exact) {
  if (predicted.size() != exact.size())
    throw std::invalid_argument("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double d = predicted[i] - exact[i];
    num += d * d;
    den += exact[i] * exact[i];
  }
  if (den == 0.0)
    throw std::invalid_argument("relative_l2: reference field has zero norm");
  return std::sqrt(num / den);
}

std::optional<CaseId> case_from_string(std::string_view name) {
  if (name == "ss-square") return CaseId::SsSquare;
  if (name == "clamped-square") return CaseId::ClampedSquare;
  if (name == "clamped-circular") return CaseId::ClampedCircular;
  if (name == "winkler") return CaseId::Winkler;
  return std::nullopt;
}

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::SsSquare: return "ss-square";
    case CaseId::ClampedSquare: return "clamped-square";
    case CaseId::ClampedCircular: return "clamped-circular";
    case CaseId::Winkler: return "winkler";
  }
  return "unknown";
}

std::vector<std::string> case_names() {
  return {"ss-square", "clamped-square", "clamped-circular", "winkler"};
}

BenchmarkCase make_benchmark(CaseId id, int winkler_terms) {
  BenchmarkCase bench;
  bench.id = id;
  bench.name = case_name(id);
  ProblemSpec& s = bench.spec;
  switch (id) {
    case CaseId::SsSquare: {
      s.load_type = "sinusoidal";
      s.boundary.assign(4, {BcKind::SimplySupported, 0.0, 0.0});
      bench.oracle = [s](double x, double y) {
        return oracle_ss_square(x, y, s.a, s.b, s.load_value, s.rigidity);
      };
      bench.oracle_jet = [s](double x, double y) {
        return oracle_ss_square_jet(x, y, s.a, s.b, s.load_value, s.rigidity);
      };
      bench.center_reference =
          oracle_ss_square(s.a / 2, s.b / 2, s.a, s.b, s.load_value, s.rigidity);
      break;
    }
    case CaseId::ClampedSquare: {
      s.load_type = "uniform";
      s.boundary.assign(4, {BcKind::Clamped, 0.0, 0.0});
      bench.oracle = [s](double x, double y) {
        return oracle_clamped_square(x, y, s.a, s.b, s.load_value, s.rigidity);
      };
      bench.oracle_jet = [s](double x, double y) {
        return oracle_clamped_square_jet(x, y, s.a, s.b, s.load_value,
                                         s.rigidity);
      };
      bench.center_exact_coeff = 0.00126;
      bench.center_ritz_coeff = 0.00133;
      bench.center_reference = bench.center_exact_coeff * s.load_value *
                               std::pow(s.a, 4) / s.rigidity;
      break;
    }
    case CaseId::ClampedCircular: {
      s.shape = PlateProblem::Shape::Disk;
      s.load_type = "uniform";
      s.boundary.assign(1, {BcKind::Clamped, 0.0, 0.0});
      bench.oracle = [s](double x, double y) {
        return oracle_clamped_circular(x, y, s.radius, s.load_value,
                                       s.rigidity);
      };
      bench.oracle_jet = [s](double x, double y) {
        return oracle_clamped_circular_jet(x, y, s.radius, s.load_value,
                                           s.rigidity);
      };
      bench.center_reference =
          s.load_value * std::pow(s.radius, 4) / (64.0 * s.rigidity);
      break;
    }
    case CaseId::Winkler: {
      s.load_type = "uniform";
      s.foundation_k = 100.0;
      s.boundary.assign(4, {BcKind::SimplySupported, 0.0, 0.0});
      bench.winkler_terms = winkler_terms;
      const ProblemSpec sc = s;
      const int nt = winkler_terms;
      bench.oracle = [sc, nt](double x, double y) {
        return oracle_winkler(x, y, sc.a, sc.b, sc.load_value, sc.rigidity,
                              sc.foundation_k, nt);
      };
      bench.oracle_jet = [sc, nt](double x, double y) {
        return oracle_winkler_jet(x, y, sc.a, sc.b, sc.load_value, sc.rigidity,
                                  sc.foundation_k, nt);
      };
      bench.center_reference = bench.oracle(s.a / 2, s.b / 2);
      break;
    }
  }
  bench.problem = bench.spec.build();
  return bench;
}

std::vector<Vec2> evaluation_lattice(const PlateProblem& problem, int nx,
                                     int ny) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("lattice: counts must be positive");
  std::vector<Vec2> pts;
  pts.reserve(std::size_t(nx) * ny);
  if (problem.shape == PlateProblem::Shape::Rectangle) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        pts.push_back({problem.a * (i + 0.5) / nx, problem.b * (j + 0.5) / ny});
  } else {
    const double r = problem.radius;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = -r + 2.0 * r * (i + 0.5) / nx;
        const double y = -r + 2.0 * r * (j + 0.5) / ny;
        if (x * x + y * y < r * r) pts.push_back({x, y});
      }
  }
  return pts;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

GridReport run_benchmark(const BenchmarkCase& bench,
                         std::span<const int> layer_counts,
                         std::span<const int> widths, const TrainConfig& cfg,
                         int n_interior, int n_boundary,
                         std::uint64_t sample_seed, int lattice,
                         bool verbose) {
  GridReport report;
  report.id = bench.id;
  report.name = bench.name;
  report.sample_seed = sample_seed;

  const CollocationSet points =
      sample_problem(bench.problem, n_interior, n_boundary, sample_seed);
  const std::vector<Vec2> grid =
      evaluation_lattice(bench.problem, lattice, lattice);
  std::vector<double> exact(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    exact[i] = bench.oracle(grid[i].x, grid[i].y);
  const Vec2 c = bench.problem.center();

  int cell_index = 0;
  for (const int layers : layer_counts) {
    for (const int width : widths) {
      TrainConfig cell_cfg = cfg;
      cell_cfg.seed = mix_seed(cfg.seed, std::uint64_t(cell_index));
      const Architecture arch{layers, width};

      const auto t0 = std::chrono::steady_clock::now();
      TrainResult tr = train(bench.problem, points, arch, cell_cfg);
      const auto t1 = std::chrono::steady_clock::now();

      CellResult cell;
      cell.layers = layers;
      cell.neurons = width;
      cell.final_loss = tr.final_loss;
      cell.iterations = tr.iterations;
      cell.diverged = tr.diverged;
      cell.seconds = std::chrono::duration<double>(t1 - t0).count();
      cell.center_deflection = forward_scalar(tr.params, c.x, c.y);
      std::vector<double> pred(grid.size());
      double max_w = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        pred[i] = forward_scalar(tr.params, grid[i].x, grid[i].y);
        max_w = std::max(max_w, std::abs(pred[i]));
      }
      cell.max_deflection = max_w;
      cell.rel_l2 = relative_l2(pred, exact);
      cell.params = std::move(tr.params);
      if (verbose)
        std::printf("  [%s] %d x %-3d  rel_l2 %.3e  center %.6e  loss %.3e  "
                    "iters %d  %.1fs\n",
                    bench.name.c_str(), layers, width, cell.rel_l2,
                    cell.center_deflection, cell.final_loss.total(),
                    cell.iterations, cell.seconds);
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return report;
}

}  // namespace platecol
