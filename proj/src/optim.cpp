#include "platecol/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace platecol {

AdamOptimizer::AdamOptimizer(int dim, double lr, double beta1, double beta2,
                             double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon),
      m_(dim, 0.0), v_(dim, 0.0) {}

void AdamOptimizer::step(std::span<double> x, std::span<const double> grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    x[i] -= lr_ * mhat / (std::sqrt(vhat) + epsilon_);
  }
}

const char* to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Minimizer of the cubic Hermite interpolant through (a, fa, da), (b, fb, db).
// Falls back to the midpoint when the interpolant is degenerate.
double cubic_minimizer(double a, double fa, double da, double b, double fb,
                       double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  if (!std::isfinite(t)) return 0.5 * (a + b);
  return t;
}

struct LineEval {
  double phi = std::numeric_limits<double>::quiet_NaN();
  double dphi = std::numeric_limits<double>::quiet_NaN();
  bool finite = false;
};

class LineSearch {
 public:
  LineSearch(const Objective& objective, std::span<const double> x0,
             std::span<const double> dir, std::vector<double>& x_out,
             std::vector<double>& g_out)
      : objective_(objective), x0_(x0), dir_(dir), x_(x_out), g_(g_out) {}

  LineEval eval(double alpha) {
    ++evals_;
    for (std::size_t i = 0; i < x0_.size(); ++i)
      x_[i] = x0_[i] + alpha * dir_[i];
    const double f = objective_(x_, g_);
    LineEval e;
    e.phi = f;
    e.dphi = dot(g_, dir_);
    e.finite = std::isfinite(f) && std::isfinite(e.dphi);
    return e;
  }

  int evals() const { return evals_; }

 private:
  const Objective& objective_;
  std::span<const double> x0_;
  std::span<const double> dir_;
  std::vector<double>& x_;
  std::vector<double>& g_;
  int evals_ = 0;
};

// Strong-Wolfe search (bracket + zoom). On success x/g hold the accepted
// point, which is always the most recently evaluated one.
bool strong_wolfe(LineSearch& ls, double phi0, double dphi0, double alpha1,
                  double c1, double c2, int max_evals, double& alpha_out,
                  double& phi_out) {
  const auto armijo = [&](double alpha, double phi) {
    return phi <= phi0 + c1 * alpha * dphi0;
  };
  const auto curvature = [&](double dphi) {
    return std::abs(dphi) <= -c2 * dphi0;
  };

  // zoom keeps invariant: alo satisfies Armijo, interval contains a Wolfe
  // point; non-finite trials are treated like too-large steps.
  const auto zoom = [&](double alo, double flo, double dlo, double ahi,
                        double fhi, double dhi, bool hi_finite) -> bool {
    for (;;) {
      if (ls.evals() >= max_evals) return false;
      double aj;
      if (hi_finite) {
        aj = cubic_minimizer(alo, flo, dlo, ahi, fhi, dhi);
        const double lo = std::min(alo, ahi), hi = std::max(alo, ahi);
        const double margin = 0.1 * (hi - lo);
        if (!(aj >= lo + margin && aj <= hi - margin)) aj = 0.5 * (alo + ahi);
      } else {
        aj = 0.5 * (alo + ahi);
      }
      if (std::abs(ahi - alo) <= 1e-16 * std::max(1.0, std::abs(alo)))
        return false;
      const LineEval e = ls.eval(aj);
      if (!e.finite || !armijo(aj, e.phi) || e.phi >= flo) {
        ahi = aj;
        fhi = e.phi;
        dhi = e.dphi;
        hi_finite = e.finite;
      } else {
        if (curvature(e.dphi)) {
          alpha_out = aj;
          phi_out = e.phi;
          return true;
        }
        if (e.dphi * (ahi - alo) >= 0.0) {
          ahi = alo;
          fhi = flo;
          dhi = dlo;
          hi_finite = true;
        }
        alo = aj;
        flo = e.phi;
        dlo = e.dphi;
      }
    }
  };

  double aprev = 0.0, fprev = phi0, dprev = dphi0;
  double alpha = alpha1;
  const double alpha_max = 1e10;
  for (int i = 1; ls.evals() < max_evals; ++i) {
    const LineEval e = ls.eval(alpha);
    if (!e.finite || !armijo(alpha, e.phi) || (i > 1 && e.phi >= fprev))
      return zoom(aprev, fprev, dprev, alpha, e.phi, e.dphi, e.finite);
    if (curvature(e.dphi)) {
      alpha_out = alpha;
      phi_out = e.phi;
      return true;
    }
    if (e.dphi >= 0.0)
      return zoom(alpha, e.phi, e.dphi, aprev, fprev, dprev, true);
    aprev = alpha;
    fprev = e.phi;
    dprev = e.dphi;
    alpha = std::min(2.0 * alpha, alpha_max);
    if (alpha >= alpha_max) return false;
  }
  return false;
}

}  // namespace

LbfgsResult lbfgs_minimize(std::vector<double>& x, const Objective& objective,
                           const LbfgsOptions& options,
                           const IterateObserver& on_accept,
                           std::vector<LbfgsStep>* trace) {
  const std::size_t n = x.size();
  std::vector<double> g(n), x_new(n), g_new(n), dir(n);
  std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
  std::vector<double> alpha_buf(options.history);

  // initial evaluation
  double f = objective(x, g);
  LbfgsResult result;
  result.final_loss = f;
  result.gradient_norm = norm2(g);
  if (!std::isfinite(f)) {
    result.status = LbfgsStatus::LineSearchFailed;
    return result;
  }
  if (result.gradient_norm <= options.gradient_tolerance ||
      (options.loss_tolerance > 0.0 && f <= options.loss_tolerance)) {
    result.status = LbfgsStatus::Converged;
    return result;
  }

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    // two-loop recursion
    std::copy(g.begin(), g.end(), dir.begin());
    const int m = int(pairs.size());
    for (int i = m - 1; i >= 0; --i) {
      const auto& [s, yv] = pairs[i];
      const double rho = 1.0 / dot(s, yv);
      const double a = rho * dot(s, dir);
      alpha_buf[i] = a;
      for (std::size_t k = 0; k < n; ++k) dir[k] -= a * yv[k];
    }
    if (m > 0) {
      const auto& [s, yv] = pairs.back();
      const double gamma = dot(s, yv) / dot(yv, yv);
      for (double& v : dir) v *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const auto& [s, yv] = pairs[i];
      const double rho = 1.0 / dot(s, yv);
      const double beta = rho * dot(yv, dir);
      for (std::size_t k = 0; k < n; ++k) dir[k] += (alpha_buf[i] - beta) * s[k];
    }
    for (double& v : dir) v = -v;

    double dphi0 = dot(g, dir);
    if (!(dphi0 < 0.0)) {
      // not a descent direction; drop the memory and restart along -g
      pairs.clear();
      for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
      dphi0 = dot(g, dir);
      if (!(dphi0 < 0.0)) {
        result.status = LbfgsStatus::Converged;  // gradient numerically zero
        return result;
      }
    }

    const double alpha1 =
        (iter == 1) ? std::min(1.0, 1.0 / norm2(g)) : 1.0;
    LineSearch ls(objective, x, dir, x_new, g_new);
    double alpha = 0.0, f_new = 0.0;
    if (!strong_wolfe(ls, f, dphi0, alpha1, options.c1, options.c2,
                      options.max_line_search, alpha, f_new)) {
      result.status = LbfgsStatus::LineSearchFailed;
      return result;
    }
    if (trace != nullptr) trace->push_back({alpha, f, f_new, dphi0});

    // curvature pair from the accepted step
    std::vector<double> s(n), yv(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = x_new[k] - x[k];
      yv[k] = g_new[k] - g[k];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-10 * norm2(s) * norm2(yv)) {
      pairs.emplace_back(std::move(s), std::move(yv));
      if (int(pairs.size()) > options.history) pairs.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    result.iterations = iter;
    result.final_loss = f;
    result.gradient_norm = norm2(g);
    if (on_accept) on_accept(iter, f, result.gradient_norm);

    if (result.gradient_norm <= options.gradient_tolerance ||
        (options.loss_tolerance > 0.0 && f <= options.loss_tolerance)) {
      result.status = LbfgsStatus::Converged;
      return result;
    }
  }
  result.status = LbfgsStatus::MaxIterations;
  return result;
}

namespace {

LbfgsOptions lbfgs_options(const TrainConfig& cfg) {
  LbfgsOptions o;
  o.history = cfg.lbfgs_history;
  o.max_iterations = cfg.max_lbfgs_iters;
  o.gradient_tolerance = cfg.lbfgs_gradient_tolerance;
  o.loss_tolerance = cfg.loss_tolerance;
  o.c1 = cfg.wolfe_c1;
  o.c2 = cfg.wolfe_c2;
  o.max_line_search = cfg.max_line_search;
  return o;
}

}  // namespace

TrainResult train_residuals(std::vector<ResidualPoint> residuals,
                            const Architecture& arch, const TrainConfig& cfg) {
  TrainResult result;
  result.params = initialize(arch, cfg.seed);
  std::vector<double>& x = result.params.values();

  LossBreakdown last_breakdown;
  Parameters scratch = result.params;
  const auto objective = [&](std::span<const double> xv,
                             std::span<double> grad) -> double {
    std::copy(xv.begin(), xv.end(), scratch.values().begin());
    std::ptrdiff_t bad = -1;
    last_breakdown =
        compute_loss_gradient(scratch, residuals, grad, cfg.threads, &bad);
    return last_breakdown.total();
  };

  int global_iter = 0;
  const char* phase = "lbfgs";
  const auto record = [&](int, double, double) {
    ++global_iter;
    result.history.push_back({global_iter, last_breakdown, phase});
  };

  // initial point
  {
    std::vector<double> g(x.size());
    const double f0 = objective(x, g);
    (void)f0;
    result.history.push_back({0, last_breakdown, "init"});
  }

  LbfgsResult lres = lbfgs_minimize(x, objective, lbfgs_options(cfg), record);
  result.lbfgs_status = lres.status;
  result.final_loss = last_breakdown;

  if (lres.status == LbfgsStatus::LineSearchFailed && cfg.max_adam_iters > 0) {
    phase = "adam";
    AdamOptimizer adam(int(x.size()), cfg);
    std::vector<double> g(x.size());
    std::vector<double> x_prev = x;
    for (int i = 0; i < cfg.max_adam_iters; ++i) {
      const double f = objective(x, g);
      if (!std::isfinite(f)) {
        x = x_prev;  // keep the last finite iterate
        result.diverged = true;
        break;
      }
      record(0, f, 0.0);
      if (cfg.loss_tolerance > 0.0 && f <= cfg.loss_tolerance) {
        result.converged = true;
        break;
      }
      x_prev = x;
      adam.step(x, g);
    }
    if (!result.diverged && cfg.retry_lbfgs) {
      phase = "lbfgs-retry";
      lres = lbfgs_minimize(x, objective, lbfgs_options(cfg), record);
      result.lbfgs_status = lres.status;
    }
  }

  // final state (x may have moved past the last recorded objective call)
  {
    std::vector<double> g(x.size());
    const double f = objective(x, g);
    result.final_loss = last_breakdown;
    result.diverged = result.diverged || !std::isfinite(f);
  }
  result.converged =
      result.converged || result.lbfgs_status == LbfgsStatus::Converged;
  result.iterations = global_iter;
  return result;
}

TrainResult train(const PlateProblem& problem, const CollocationSet& points,
                  const Architecture& arch, const TrainConfig& cfg,
                  const LossWeights& weights) {
  return train_residuals(assemble_residuals(problem, points, weights), arch,
                         cfg);
}

}  // namespace platecol
