#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "platecol/network.hpp"
#include "platecol/plate.hpp"
#include "platecol/sampling.hpp"

namespace platecol {

// The four mean-squared residual terms of the composite loss: interior
// governing equation plus one term per boundary class. Terms for boundary
// classes absent from the problem are exactly zero.
struct LossBreakdown {
  double interior = 0.0;          // MSE over the governing-equation residual
  double clamped = 0.0;           // Gamma_1
  double simply_supported = 0.0;  // Gamma_2
  double free_edge = 0.0;         // Gamma_3

  double total() const {
    return interior + clamped + simply_supported + free_edge;
  }
};

// Optional scaling of the four terms; 1.0 everywhere reproduces the plain sum.
struct LossWeights {
  double interior = 1.0;
  double clamped = 1.0;
  double simply_supported = 1.0;
  double free_edge = 1.0;
};

struct NumericError : std::runtime_error {
  explicit NumericError(std::ptrdiff_t index)
      : std::runtime_error("non-finite residual at collocation point " +
                           std::to_string(index)),
        point_index(index) {}
  std::ptrdiff_t point_index;
};

// Expand problem + collocation set into per-point residual equations for the
// batch engine. Interior points contribute one equation, boundary points the
// two equations of their segment's class; every equation is weighted by
// 1/N of its point family so the bucket sums are means.
std::vector<ResidualPoint> assemble_residuals(const PlateProblem& problem,
                                              const CollocationSet& points,
                                              const LossWeights& weights = {});

LossBreakdown to_breakdown(const BatchLossResult& r);

// Forward-only loss; throws NumericError naming the first offending point
// when any residual is non-finite.
LossBreakdown compute_loss(const Parameters& params,
                           const PlateProblem& problem,
                           const CollocationSet& points, int threads = 0);

// Loss and full parameter gradient; non-finite values are reported through
// `nonfinite` (or the result) instead of throwing so optimizers can reject.
LossBreakdown compute_loss_gradient(const Parameters& params,
                                    std::span<const ResidualPoint> residuals,
                                    std::span<double> grad, int threads = 0,
                                    std::ptrdiff_t* nonfinite = nullptr);

}  // namespace platecol
