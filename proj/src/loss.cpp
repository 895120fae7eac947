#include "platecol/loss.hpp"

#include <array>
#include <stdexcept>

namespace platecol {

namespace {

int family_of(BcKind kind) {
  switch (kind) {
    case BcKind::Clamped: return 1;
    case BcKind::SimplySupported: return 2;
    case BcKind::Free: return 3;
  }
  return 1;
}

}  // namespace

std::vector<ResidualPoint> assemble_residuals(const PlateProblem& problem,
                                              const CollocationSet& points,
                                              const LossWeights& weights) {
  if (int(problem.boundary.size()) != problem.segments())
    throw std::invalid_argument(
        "loss: problem must assign one boundary condition per segment");

  std::array<int, 4> family_count{int(points.interior.size()), 0, 0, 0};
  for (const BoundaryPoint& bp : points.boundary) {
    if (bp.segment < 0 || bp.segment >= problem.segments())
      throw std::invalid_argument("loss: boundary point with unknown segment");
    ++family_count[family_of(problem.boundary[bp.segment].kind)];
  }
  const std::array<double, 4> family_weight{
      weights.interior, weights.clamped, weights.simply_supported,
      weights.free_edge};

  std::vector<ResidualPoint> residuals;
  residuals.reserve(points.interior.size() + points.boundary.size());
  for (const Vec2& p : points.interior) {
    ResidualPoint rp;
    rp.x = p.x;
    rp.y = p.y;
    rp.n_residuals = 1;
    const JetFunctional f = interior_functional(
        problem.load(p.x, p.y), problem.foundation_k, problem.material);
    rp.residuals[0].coeff = f.coeff;
    rp.residuals[0].shift = f.shift;
    rp.residuals[0].weight = family_weight[0] / double(family_count[0]);
    rp.residuals[0].family = 0;
    residuals.push_back(rp);
  }
  for (const BoundaryPoint& bp : points.boundary) {
    const BoundaryCondition& bc = problem.boundary[bp.segment];
    const int fam = family_of(bc.kind);
    const auto [r1, r2] = boundary_functionals(bc, {bp.nx, bp.ny},
                                               problem.material, {bp.x, bp.y});
    ResidualPoint rp;
    rp.x = bp.x;
    rp.y = bp.y;
    rp.n_residuals = 2;
    const double w = family_weight[fam] / double(family_count[fam]);
    rp.residuals[0] = {r1.coeff, r1.shift, w, fam};
    rp.residuals[1] = {r2.coeff, r2.shift, w, fam};
    residuals.push_back(rp);
  }
  return residuals;
}

LossBreakdown to_breakdown(const BatchLossResult& r) {
  return {r.family_sums[0], r.family_sums[1], r.family_sums[2],
          r.family_sums[3]};
}

LossBreakdown compute_loss(const Parameters& params,
                           const PlateProblem& problem,
                           const CollocationSet& points, int threads) {
  const auto residuals = assemble_residuals(problem, points);
  const BatchLossResult r = batch_loss(params, residuals, threads);
  if (r.first_nonfinite >= 0) throw NumericError(r.first_nonfinite);
  return to_breakdown(r);
}

LossBreakdown compute_loss_gradient(const Parameters& params,
                                    std::span<const ResidualPoint> residuals,
                                    std::span<double> grad, int threads,
                                    std::ptrdiff_t* nonfinite) {
  const BatchLossResult r = batch_loss_gradient(params, residuals, grad, threads);
  if (nonfinite != nullptr) *nonfinite = r.first_nonfinite;
  return to_breakdown(r);
}

}  // namespace platecol
