#include "platecol/kernels.hpp"

namespace platecol::kernels {
namespace {

void axpy_scalar(double* dst, double a, const double* x) {
  for (int s = 0; s < kJetSlots; ++s) dst[s] += a * x[s];
}

void scale_scalar(double* dst, double a) {
  for (int s = 0; s < kJetSlots; ++s) dst[s] *= a;
}

double dot_scalar(const double* a, const double* b) {
  double acc = 0.0;
  for (int s = 0; s < kJetSlots; ++s) acc += a[s] * b[s];
  return acc;
}

void mul_scalar(double* out, const double* a, const double* b) {
  for (int s = 0; s < kJetSlots; ++s) out[s] = 0.0;
  for (const MulTerm& t : kMulTerms) out[t.dst] += t.weight * a[t.a] * b[t.b];
}

void mul_adjoint_scalar(double* a_bar, double* b_bar, const double* out_bar,
                        const double* a, const double* b) {
  for (const MulTerm& t : kMulTerms) {
    const double g = t.weight * out_bar[t.dst];
    a_bar[t.a] += g * b[t.b];
    b_bar[t.b] += g * a[t.a];
  }
}

void affine_scalar(double* out, const double* w, const double* bias,
                   const double* in, int n_out, int n_in) {
  for (int j = 0; j < n_out; ++j) {
    double* oj = out + j * kJetSlots;
    for (int s = 0; s < kJetSlots; ++s) oj[s] = 0.0;
    const double* wj = w + j * n_in;
    for (int k = 0; k < n_in; ++k) axpy_scalar(oj, wj[k], in + k * kJetSlots);
    oj[0] += bias[j];
  }
}

void affine_adjoint_input_scalar(double* in_bar, const double* w,
                                 const double* out_bar, int n_out, int n_in) {
  for (int j = 0; j < n_out; ++j) {
    const double* wj = w + j * n_in;
    const double* oj = out_bar + j * kJetSlots;
    for (int k = 0; k < n_in; ++k) axpy_scalar(in_bar + k * kJetSlots, wj[k], oj);
  }
}

void affine_param_grads_scalar(double* w_bar, double* bias_bar,
                               const double* out_bar, const double* in,
                               int n_out, int n_in) {
  for (int j = 0; j < n_out; ++j) {
    const double* oj = out_bar + j * kJetSlots;
    double* wj = w_bar + j * n_in;
    for (int k = 0; k < n_in; ++k) wj[k] += dot_scalar(oj, in + k * kJetSlots);
    bias_bar[j] += oj[0];
  }
}

constexpr Table kScalarTable = {
    "scalar",
    axpy_scalar,
    scale_scalar,
    dot_scalar,
    mul_scalar,
    mul_adjoint_scalar,
    affine_scalar,
    affine_adjoint_input_scalar,
    affine_param_grads_scalar,
};

}  // namespace

const Table& scalar_table() { return kScalarTable; }

}  // namespace platecol::kernels
