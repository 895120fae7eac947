#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "platecol/jet.hpp"

namespace platecol {

// Dense feedforward map R^2 -> R: tanh on every hidden layer, linear output.
struct Architecture {
  int hidden_layers = 1;
  int neurons = 20;

  static constexpr int kInputDim = 2;
  static constexpr int kOutputDim = 1;
  static constexpr int kMaxHiddenLayers = 8;

  bool valid() const {
    return hidden_layers >= 1 && hidden_layers <= kMaxHiddenLayers &&
           neurons >= 1;
  }
  // {2, neurons, ..., neurons, 1}
  std::vector<int> layer_sizes() const;
  int param_count() const;
  bool operator==(const Architecture&) const = default;
};

// Per-layer weight matrices (row-major, out x in) and bias vectors, stored
// flat in layer order: W^1, b^1, W^2, b^2, ...
class Parameters {
 public:
  Parameters() = default;
  explicit Parameters(const Architecture& arch);

  const Architecture& arch() const { return arch_; }
  int count() const { return int(values_.size()); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  int layers() const { return arch_.hidden_layers + 1; }
  int layer_in(int layer) const { return sizes_[layer]; }
  int layer_out(int layer) const { return sizes_[layer + 1]; }
  int weight_offset(int layer) const { return w_off_[layer]; }
  int bias_offset(int layer) const { return b_off_[layer]; }

  double* weights(int layer) { return values_.data() + w_off_[layer]; }
  const double* weights(int layer) const { return values_.data() + w_off_[layer]; }
  double* biases(int layer) { return values_.data() + b_off_[layer]; }
  const double* biases(int layer) const { return values_.data() + b_off_[layer]; }

 private:
  Architecture arch_;
  std::vector<int> sizes_;
  std::vector<int> w_off_, b_off_;
  std::vector<double> values_;
};

// Weights drawn from N(0, 1/fan_in), biases zero. Deterministic per seed.
Parameters initialize(const Architecture& arch, std::uint64_t seed);

double forward_scalar(const Parameters& params, double x, double y);
Jet forward_jet(const Parameters& params, double x, double y);

struct EvalPoint {
  double x, y;
};

// A linear functional of the jet plus offset, r = <coeff, jet> - shift,
// contributing weight * r^2 to the loss under accumulation bucket `family`.
struct LinearResidual {
  std::array<double, kJetCount> coeff{};
  double shift = 0.0;
  double weight = 1.0;
  int family = 0;
};

// Collocation point with the one or two residual equations enforced there.
struct ResidualPoint {
  double x = 0.0, y = 0.0;
  int n_residuals = 0;
  std::array<LinearResidual, 2> residuals{};
};

struct BatchLossResult {
  std::array<double, 4> family_sums{};  // sum of weight * r^2 per family
  double total = 0.0;
  std::ptrdiff_t first_nonfinite = -1;  // point index, -1 when all finite
};

// Full-batch loss over the residual points; deterministic for any thread
// count (fixed-size chunks reduced in order). threads <= 0 selects
// hardware concurrency.
BatchLossResult batch_loss(const Parameters& params,
                           std::span<const ResidualPoint> points, int threads);

// Loss plus exact d(loss)/d(theta) by reverse accumulation with jet-shaped
// adjoints. `grad` must have params.count() entries; it is overwritten.
BatchLossResult batch_loss_gradient(const Parameters& params,
                                    std::span<const ResidualPoint> points,
                                    std::span<double> grad, int threads);

// Generic gradient entry point: the loss callback receives the forward jets
// at all points and must fill d(loss)/d(jet) seeds, returning the loss value.
using JetLossFn =
    std::function<double(std::span<const Jet>, std::span<Jet>)>;

double loss_gradient(const Parameters& params, std::span<const EvalPoint> pts,
                     const JetLossFn& fn, std::vector<double>& grad);

}  // namespace platecol
