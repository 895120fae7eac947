#pragma once

#include <array>
#include <cstdint>

namespace platecol {

// Truncated bivariate derivative blocks: one double per partial derivative
// d^(i+j) f / dx^i dy^j with i + j <= 4, plus one padding slot that every
// kernel keeps at zero so blocks can be processed four lanes at a time.
inline constexpr int kJetOrder = 4;
inline constexpr int kJetCount = 15;
inline constexpr int kJetSlots = 16;

// Slots are grouped by total order: (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2) | ...
constexpr int jet_index(int dx, int dy) {
  constexpr int base[kJetOrder + 1] = {0, 1, 3, 6, 10};
  return base[dx + dy] + dy;
}

namespace kernels {

// One multiply-accumulate of the Leibniz product rule:
//   out[dst] += weight * lhs[a] * rhs[b]
struct MulTerm {
  std::uint8_t dst, a, b;
  double weight;
};

inline constexpr int kMulTermCount = 70;

namespace detail {

constexpr double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
  return r;
}

constexpr std::array<MulTerm, kMulTermCount> make_mul_terms() {
  std::array<MulTerm, kMulTermCount> terms{};
  int n = 0;
  for (int order = 0; order <= kJetOrder; ++order) {
    for (int j = 0; j <= order; ++j) {
      const int i = order - j;
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= j; ++q) {
          terms[n].dst = std::uint8_t(jet_index(i, j));
          terms[n].a = std::uint8_t(jet_index(p, q));
          terms[n].b = std::uint8_t(jet_index(i - p, j - q));
          terms[n].weight = binomial(i, p) * binomial(j, q);
          ++n;
        }
      }
    }
  }
  return terms;
}

}  // namespace detail

inline constexpr auto kMulTerms = detail::make_mul_terms();

// Kernel table over 16-slot coefficient blocks. Jet arrays are contiguous
// blocks of kJetSlots doubles; `affine*` kernels treat `in`/`out` as arrays
// of such blocks. No kernel may be called with aliasing dst/src.
struct Table {
  const char* name;
  // dst += a * x
  void (*axpy)(double* dst, double a, const double* x);
  // dst *= a
  void (*scale)(double* dst, double a);
  double (*dot)(const double* a, const double* b);
  // out = leibniz(a, b), truncated at total order 4
  void (*mul)(double* out, const double* a, const double* b);
  // reverse-mode companion of mul: given out_bar, accumulate
  //   a_bar += d<out_bar, mul(a,b)>/da,  b_bar += d<out_bar, mul(a,b)>/db
  void (*mul_adjoint)(double* a_bar, double* b_bar, const double* out_bar,
                      const double* a, const double* b);
  // out[j] = sum_k w[j*n_in+k] * in[k]; bias lands on the value slot only
  void (*affine)(double* out, const double* w, const double* bias,
                 const double* in, int n_out, int n_in);
  // in_bar[k] += sum_j w[j*n_in+k] * out_bar[j]
  void (*affine_adjoint_input)(double* in_bar, const double* w,
                               const double* out_bar, int n_out, int n_in);
  // w_bar[j*n_in+k] += <out_bar[j], in[k]>, bias_bar[j] += out_bar[j][0]
  void (*affine_param_grads)(double* w_bar, double* bias_bar,
                             const double* out_bar, const double* in,
                             int n_out, int n_in);
};

const Table& scalar_table();

// AVX2+FMA variant; nullptr when the CPU lacks support.
const Table* avx2_table();

// Table selected at startup: AVX2 when available, scalar otherwise.
// PLATECOL_KERNELS=scalar|avx2 overrides the choice.
const Table& active();

// Test hook; not thread-safe against concurrent kernel use.
void set_active(const Table& table);

}  // namespace kernels
}  // namespace platecol
