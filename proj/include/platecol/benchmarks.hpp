#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "platecol/network.hpp"
#include "platecol/optim.hpp"
#include "platecol/plate.hpp"

namespace platecol {

// Deflection of a simply-supported rectangle under the sinusoidal load
// p0 sin(pi x/a) sin(pi y/b):
//   w = p0 / (pi^4 D (1/a^2 + 1/b^2)^2) sin(pi x/a) sin(pi y/b)
double oracle_ss_square(double x, double y, double a, double b, double p0,
                        double d);
Jet oracle_ss_square_jet(double x, double y, double a, double b, double p0,
                         double d);

// Four-term Galerkin series for the clamped rectangle under uniform load.
// This is a reference approximation, not a pointwise solution of the
// governing equation; it satisfies the clamped boundary conditions exactly.
double oracle_clamped_square(double x, double y, double a, double b, double p,
                             double d);
Jet oracle_clamped_square_jet(double x, double y, double a, double b, double p,
                              double d);

// Clamped circular plate under uniform load: w = p (R^2 - r^2)^2 / (64 D).
double oracle_clamped_circular(double x, double y, double r, double p,
                               double d);
Jet oracle_clamped_circular_jet(double x, double y, double r, double p,
                                double d);

// Simply-supported rectangle on a Winkler foundation under uniform load,
// truncated double sine series over odd m, n (n_terms odd indices per
// direction):
//   w = sum 16 p sin(m pi x/a) sin(n pi y/b)
//           / (pi^2 m n [pi^4 D (m^2/a^2 + n^2/b^2)^2 + k])
double oracle_winkler(double x, double y, double a, double b, double p,
                      double d, double k, int n_terms);
Jet oracle_winkler_jet(double x, double y, double a, double b, double p,
                       double d, double k, int n_terms);

// The identically truncated expansion of the uniform load; pairing the
// series solution with this load makes the interior residual vanish
// termwise at any truncation.
double winkler_load_partial(double x, double y, double a, double b, double p,
                            int n_terms);

// ||predicted - exact||_2 / ||exact||_2 over matching sample vectors.
double relative_l2(std::span<const double> predicted,
                   std::span<const double> exact);

enum class CaseId { SsSquare, ClampedSquare, ClampedCircular, Winkler };

std::optional<CaseId> case_from_string(std::string_view name);
std::string case_name(CaseId id);
std::vector<std::string> case_names();

struct BenchmarkCase {
  CaseId id;
  std::string name;
  ProblemSpec spec;
  PlateProblem problem;
  std::function<double(double, double)> oracle;
  std::function<Jet(double, double)> oracle_jet;
  double center_reference;  // deflection the trained model is judged against
  // clamped square only: the two literature center coefficients (x q a^4/D)
  double center_exact_coeff = 0.0;
  double center_ritz_coeff = 0.0;
  int winkler_terms = 0;
};

BenchmarkCase make_benchmark(CaseId id, int winkler_terms = 25);

// Cell-centred nx x ny lattice over the domain's bounding box, clipped to
// the domain (a 1x1 lattice is the single centre point).
std::vector<Vec2> evaluation_lattice(const PlateProblem& problem, int nx,
                                     int ny);

struct CellResult {
  int layers = 0;
  int neurons = 0;
  double center_deflection = 0.0;
  double max_deflection = 0.0;
  double rel_l2 = 0.0;
  LossBreakdown final_loss;
  int iterations = 0;
  double seconds = 0.0;
  bool diverged = false;
  Parameters params;
};

struct GridReport {
  CaseId id;
  std::string name;
  std::uint64_t sample_seed = 0;
  std::vector<CellResult> cells;
};

// Train every (layers, neurons) cell of the grid on a shared collocation
// set and evaluate it against the case oracle. Divergence in one cell is
// recorded without aborting the rest.
GridReport run_benchmark(const BenchmarkCase& bench,
                         std::span<const int> layer_counts,
                         std::span<const int> widths, const TrainConfig& cfg,
                         int n_interior, int n_boundary,
                         std::uint64_t sample_seed, int lattice = 101,
                         bool verbose = false);

// Deterministic per-cell seed derived from a base seed and the cell shape.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace platecol
