#include "platecol/network.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <thread>

namespace platecol {

std::vector<int> Architecture::layer_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(hidden_layers + 2);
  sizes.push_back(kInputDim);
  for (int l = 0; l < hidden_layers; ++l) sizes.push_back(neurons);
  sizes.push_back(kOutputDim);
  return sizes;
}

int Architecture::param_count() const {
  const auto sizes = layer_sizes();
  int n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += sizes[l + 1] * sizes[l] + sizes[l + 1];
  return n;
}

Parameters::Parameters(const Architecture& arch) : arch_(arch) {
  if (!arch.valid()) throw std::invalid_argument("network: invalid architecture");
  sizes_ = arch.layer_sizes();
  int off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(off);
    off += sizes_[l + 1] * sizes_[l];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  values_.assign(off, 0.0);
}

Parameters initialize(const Architecture& arch, std::uint64_t seed) {
  Parameters p(arch);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < p.layers(); ++l) {
    const int fan_in = p.layer_in(l);
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(double(fan_in)));
    double* w = p.weights(l);
    const int nw = p.layer_out(l) * fan_in;
    for (int i = 0; i < nw; ++i) w[i] = dist(rng);
    // biases stay zero
  }
  return p;
}

double forward_scalar(const Parameters& params, double x, double y) {
  std::vector<double> cur = {x, y};
  std::vector<double> next;
  for (int l = 0; l < params.layers(); ++l) {
    const int m = params.layer_out(l);
    const int n = params.layer_in(l);
    const double* w = params.weights(l);
    const double* b = params.biases(l);
    next.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
      double acc = b[j];
      for (int k = 0; k < n; ++k) acc += w[j * n + k] * cur[k];
      next[j] = (l + 1 < params.layers()) ? std::tanh(acc) : acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

namespace {

constexpr int kChunk = 64;

// Forward-pass state kept per hidden layer for the reverse sweep.
struct LayerCache {
  std::vector<double> u;    // pre-activation jets, value slot zeroed
  std::vector<double> act;  // activated jets
  std::vector<double> h1, h2, h3;  // Horner intermediates of the composition
  std::vector<double> td;   // per neuron: a0, t, d1, d2, d3, d4

  void resize(int width) {
    u.assign(std::size_t(width) * kJetSlots, 0.0);
    act.assign(std::size_t(width) * kJetSlots, 0.0);
    h1.assign(std::size_t(width) * kJetSlots, 0.0);
    h2.assign(std::size_t(width) * kJetSlots, 0.0);
    h3.assign(std::size_t(width) * kJetSlots, 0.0);
    td.assign(std::size_t(width) * 6, 0.0);
  }
};

struct Workspace {
  std::vector<LayerCache> hidden;
  alignas(32) std::array<double, 2 * kJetSlots> input{};
  alignas(32) std::array<double, kJetSlots> out{};
  std::vector<double> bar_a, bar_b;  // adjoint buffers, width x 16
  alignas(32) std::array<double, kJetSlots> ubar{}, hbar_in{}, hbar_out{};

  explicit Workspace(const Parameters& p) {
    hidden.resize(p.arch().hidden_layers);
    for (auto& l : hidden) l.resize(p.arch().neurons);
    const std::size_t w = std::size_t(std::max(p.arch().neurons, 2)) * kJetSlots;
    bar_a.assign(w, 0.0);
    bar_b.assign(w, 0.0);
  }
};

void forward_point(const Parameters& p, double x, double y, Workspace& ws) {
  const auto& K = kernels::active();
  ws.input.fill(0.0);
  ws.input[0] = x;
  ws.input[jet_index(1, 0)] = 1.0;
  ws.input[kJetSlots + 0] = y;
  ws.input[kJetSlots + jet_index(0, 1)] = 1.0;

  const double* cur = ws.input.data();
  int cur_n = 2;
  const int n_hidden = p.arch().hidden_layers;
  for (int l = 0; l < n_hidden; ++l) {
    LayerCache& lc = ws.hidden[l];
    const int m = p.layer_out(l);
    K.affine(lc.u.data(), p.weights(l), p.biases(l), cur, m, cur_n);
    for (int j = 0; j < m; ++j) {
      double* u = lc.u.data() + std::size_t(j) * kJetSlots;
      const double a0 = u[0];
      u[0] = 0.0;
      const auto d = tanh_derivatives(a0);
      double* td = lc.td.data() + std::size_t(j) * 6;
      td[0] = a0;
      td[1] = d[0];
      td[2] = d[1];
      td[3] = d[2];
      td[4] = d[3];
      td[5] = d[4];
      const double c1 = d[1];
      const double c2 = d[2] / 2.0;
      const double c3 = d[3] / 6.0;
      const double c4 = d[4] / 24.0;
      double* h3 = lc.h3.data() + std::size_t(j) * kJetSlots;
      double* h2 = lc.h2.data() + std::size_t(j) * kJetSlots;
      double* h1 = lc.h1.data() + std::size_t(j) * kJetSlots;
      double* act = lc.act.data() + std::size_t(j) * kJetSlots;
      for (int s = 0; s < kJetSlots; ++s) h3[s] = c4 * u[s];
      h3[0] = c3;
      K.mul(h2, u, h3);
      h2[0] += c2;
      K.mul(h1, u, h2);
      h1[0] += c1;
      K.mul(act, u, h1);
      act[0] += d[0];
    }
    cur = lc.act.data();
    cur_n = m;
  }
  K.affine(ws.out.data(), p.weights(n_hidden), p.biases(n_hidden), cur, 1,
           cur_n);
}

// Reverse sweep from d(loss)/d(output jet); accumulates into grad.
void backward_point(const Parameters& p, const double* seed, Workspace& ws,
                    double* grad) {
  const auto& K = kernels::active();
  const int n_hidden = p.arch().hidden_layers;
  const int out_layer = n_hidden;
  const double* last_act =
      n_hidden > 0 ? ws.hidden[n_hidden - 1].act.data() : ws.input.data();
  const int last_n = p.layer_in(out_layer);

  K.affine_param_grads(grad + p.weight_offset(out_layer),
                       grad + p.bias_offset(out_layer), seed, last_act, 1,
                       last_n);
  double* ybar = ws.bar_a.data();
  std::memset(ybar, 0, std::size_t(last_n) * kJetSlots * sizeof(double));
  K.affine_adjoint_input(ybar, p.weights(out_layer), seed, 1, last_n);

  double* abar = ws.bar_b.data();
  for (int l = n_hidden - 1; l >= 0; --l) {
    LayerCache& lc = ws.hidden[l];
    const int m = p.layer_out(l);
    const int n = p.layer_in(l);
    for (int j = 0; j < m; ++j) {
      const double* yb = ybar + std::size_t(j) * kJetSlots;
      const double* u = lc.u.data() + std::size_t(j) * kJetSlots;
      const double* h1 = lc.h1.data() + std::size_t(j) * kJetSlots;
      const double* h2 = lc.h2.data() + std::size_t(j) * kJetSlots;
      const double* h3 = lc.h3.data() + std::size_t(j) * kJetSlots;
      const double* td = lc.td.data() + std::size_t(j) * 6;

      double* ub = ws.ubar.data();
      double* hin = ws.hbar_in.data();
      double* hout = ws.hbar_out.data();
      std::memset(ub, 0, kJetSlots * sizeof(double));
      std::memset(hin, 0, kJetSlots * sizeof(double));

      const double tbar = yb[0];
      K.mul_adjoint(ub, hin, yb, u, h1);  // act = t + u*h1
      const double c1bar = hin[0];
      std::memset(hout, 0, kJetSlots * sizeof(double));
      K.mul_adjoint(ub, hout, hin, u, h2);  // h1 = c1 + u*h2
      const double c2bar = hout[0];
      std::memset(hin, 0, kJetSlots * sizeof(double));
      K.mul_adjoint(ub, hin, hout, u, h3);  // h2 = c2 + u*h3
      const double c3bar = hin[0];
      const double c4bar = K.dot(hin, u);  // h3 = c3 + c4*u
      const double c4 = td[5] / 24.0;
      K.axpy(ub, c4, hin);

      // value slot: all coefficients depend on a0 through the tanh chain
      const double t = td[1], d1 = td[2], d2 = td[3], d3 = td[4], d4 = td[5];
      const double d5 =
          -2.0 * (3.0 * d2 * d2 + 4.0 * d1 * d3 + t * d4);
      ub[0] = tbar * d1 + c1bar * d2 + c2bar * (d3 / 2.0) +
              c3bar * (d4 / 6.0) + c4bar * (d5 / 24.0);
      ub[kJetSlots - 1] = 0.0;
      std::memcpy(abar + std::size_t(j) * kJetSlots, ub,
                  kJetSlots * sizeof(double));
    }
    const double* in_act =
        l > 0 ? ws.hidden[l - 1].act.data() : ws.input.data();
    K.affine_param_grads(grad + p.weight_offset(l), grad + p.bias_offset(l),
                         abar, in_act, m, n);
    if (l > 0) {
      std::memset(ybar, 0, std::size_t(n) * kJetSlots * sizeof(double));
      K.affine_adjoint_input(ybar, p.weights(l), abar, m, n);
    }
  }
}

int resolve_threads(int threads, std::size_t n_points) {
  if (threads <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : int(hc);
  }
  const int n_chunks = int((n_points + kChunk - 1) / kChunk);
  return std::max(1, std::min(threads, n_chunks));
}

struct ChunkPartial {
  std::array<double, 4> family_sums{};
  std::ptrdiff_t first_nonfinite = -1;
  std::vector<double> grad;
};

// Shared driver for loss-only and loss+gradient evaluation.
BatchLossResult run_batch(const Parameters& params,
                          std::span<const ResidualPoint> points,
                          std::span<double> grad, bool want_grad,
                          int threads) {
  if (want_grad) {
    assert(grad.size() == std::size_t(params.count()));
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const std::size_t n = points.size();
  BatchLossResult result;
  if (n == 0) return result;

  const int n_chunks = int((n + kChunk - 1) / kChunk);
  std::vector<ChunkPartial> partials(n_chunks);
  const int n_threads = resolve_threads(threads, n);

  std::atomic<int> next{0};
  auto worker = [&]() {
    Workspace ws(params);
    alignas(32) std::array<double, kJetSlots> seed{};
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= n_chunks) break;
      ChunkPartial& part = partials[c];
      if (want_grad) part.grad.assign(params.count(), 0.0);
      const std::size_t lo = std::size_t(c) * kChunk;
      const std::size_t hi = std::min(n, lo + kChunk);
      for (std::size_t i = lo; i < hi; ++i) {
        const ResidualPoint& pt = points[i];
        forward_point(params, pt.x, pt.y, ws);
        seed.fill(0.0);
        bool finite = true;
        for (int r = 0; r < pt.n_residuals; ++r) {
          const LinearResidual& res = pt.residuals[r];
          double val = -res.shift;
          for (int s = 0; s < kJetCount; ++s)
            val += res.coeff[s] * ws.out[s];
          const double contrib = res.weight * val * val;
          part.family_sums[res.family] += contrib;
          finite = finite && std::isfinite(contrib);
          if (want_grad) {
            const double g = 2.0 * res.weight * val;
            for (int s = 0; s < kJetCount; ++s)
              seed[s] += g * res.coeff[s];
          }
        }
        if (!finite && part.first_nonfinite < 0)
          part.first_nonfinite = std::ptrdiff_t(i);
        if (want_grad) backward_point(params, seed.data(), ws, part.grad.data());
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // fixed-order reduction keeps results independent of the thread count
  for (const ChunkPartial& part : partials) {
    for (int f = 0; f < 4; ++f) result.family_sums[f] += part.family_sums[f];
    if (result.first_nonfinite < 0 && part.first_nonfinite >= 0)
      result.first_nonfinite = part.first_nonfinite;
    if (want_grad)
      for (int k = 0; k < params.count(); ++k) grad[k] += part.grad[k];
  }
  result.total = result.family_sums[0] + result.family_sums[1] +
                 result.family_sums[2] + result.family_sums[3];
  return result;
}

}  // namespace

Jet forward_jet(const Parameters& params, double x, double y) {
  Workspace ws(params);
  forward_point(params, x, y, ws);
  Jet j;
  std::memcpy(j.c.data(), ws.out.data(), kJetSlots * sizeof(double));
  return j;
}

BatchLossResult batch_loss(const Parameters& params,
                           std::span<const ResidualPoint> points,
                           int threads) {
  return run_batch(params, points, {}, false, threads);
}

BatchLossResult batch_loss_gradient(const Parameters& params,
                                    std::span<const ResidualPoint> points,
                                    std::span<double> grad, int threads) {
  return run_batch(params, points, grad, true, threads);
}

double loss_gradient(const Parameters& params, std::span<const EvalPoint> pts,
                     const JetLossFn& fn, std::vector<double>& grad) {
  grad.assign(params.count(), 0.0);
  std::vector<Jet> jets(pts.size());
  Workspace ws(params);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    forward_point(params, pts[i].x, pts[i].y, ws);
    std::memcpy(jets[i].c.data(), ws.out.data(), kJetSlots * sizeof(double));
  }
  std::vector<Jet> seeds(pts.size());
  const double loss = fn(jets, seeds);
  // replay each forward pass so the reverse sweep sees its intermediates
  for (std::size_t i = 0; i < pts.size(); ++i) {
    forward_point(params, pts[i].x, pts[i].y, ws);
    backward_point(params, seeds[i].c.data(), ws, grad.data());
  }
  return loss;
}

}  // namespace platecol
