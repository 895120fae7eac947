#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "platecol/loss.hpp"
#include "platecol/network.hpp"
#include "platecol/plate.hpp"
#include "platecol/sampling.hpp"

namespace platecol {

struct TrainConfig {
  // L-BFGS
  int max_lbfgs_iters = 3000;
  int lbfgs_history = 20;
  double lbfgs_gradient_tolerance = 1e-10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 40;
  // Adam fallback, entered when the line search fails
  double adam_learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int max_adam_iters = 2000;
  bool retry_lbfgs = true;  // one more L-BFGS pass after the Adam phase
  // shared
  double loss_tolerance = 0.0;  // converged when total loss <= this
  std::uint64_t seed = 0;       // parameter initialization
  int threads = 0;              // 0 = hardware concurrency
};

// Bias-corrected first/second moment update; parameters move against the
// gradient.
class AdamOptimizer {
 public:
  AdamOptimizer(int dim, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);
  explicit AdamOptimizer(int dim, const TrainConfig& cfg)
      : AdamOptimizer(dim, cfg.adam_learning_rate, cfg.adam_beta1,
                      cfg.adam_beta2, cfg.adam_epsilon) {}

  void step(std::span<double> x, std::span<const double> grad);
  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

enum class LbfgsStatus { Converged, LineSearchFailed, MaxIterations };

const char* to_string(LbfgsStatus s);

struct LbfgsOptions {
  int history = 20;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-10;
  double loss_tolerance = 0.0;
  double c1 = 1e-4;  // Armijo sufficient decrease
  double c2 = 0.9;   // strong Wolfe curvature
  int max_line_search = 40;
};

// One accepted line search, recorded for post-hoc condition checks.
struct LbfgsStep {
  double step;        // accepted alpha
  double f0;          // objective at the line origin
  double f1;          // objective at the accepted point
  double dphi0;       // directional derivative at the origin
};

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  int iterations = 0;
  double final_loss = 0.0;
  double gradient_norm = 0.0;
};

// Objective evaluates f(x) and writes the gradient (same length as x).
using Objective =
    std::function<double(std::span<const double>, std::span<double>)>;

// Accepted-iterate observer: (iteration, loss, gradient norm).
using IterateObserver = std::function<void(int, double, double)>;

// Two-loop recursion with strong-Wolfe line search. Non-finite objective
// values during the search shrink the trial interval rather than aborting;
// LineSearchFailed is returned when no acceptable step exists, with x left
// at the last accepted iterate.
LbfgsResult lbfgs_minimize(std::vector<double>& x, const Objective& objective,
                           const LbfgsOptions& options,
                           const IterateObserver& on_accept = {},
                           std::vector<LbfgsStep>* trace = nullptr);

struct TrainRecord {
  int iteration;
  LossBreakdown loss;
  std::string phase;  // "lbfgs" | "adam" | "lbfgs-retry"
};

struct TrainResult {
  Parameters params;
  std::vector<TrainRecord> history;
  LossBreakdown final_loss;
  LbfgsStatus lbfgs_status = LbfgsStatus::MaxIterations;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

// Combined strategy: L-BFGS first; if its line search fails, an Adam phase
// with a small learning rate, then optionally one more L-BFGS pass.
// Deterministic for a fixed config (threading does not affect results).
TrainResult train(const PlateProblem& problem, const CollocationSet& points,
                  const Architecture& arch, const TrainConfig& cfg,
                  const LossWeights& weights = {});

// Same strategy for an arbitrary residual set (used for plain data fits).
TrainResult train_residuals(std::vector<ResidualPoint> residuals,
                            const Architecture& arch, const TrainConfig& cfg);

}  // namespace platecol
