#include "platecol/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>

#define PLATECOL_AVX2 __attribute__((target("avx2,fma")))

namespace platecol::kernels {
namespace {

// Per a-slot vector view of the Leibniz term table: for output group g
// (slots 4g..4g+3), weight lane and the b-slot to gather from. Invalid lanes
// carry weight 0 and point at the padding slot.
struct MulVecTables {
  alignas(32) double w[kJetCount][4][4];
  alignas(16) std::int32_t idx[kJetCount][4][4];
};

constexpr MulVecTables make_vec_tables() {
  MulVecTables t{};
  for (int k = 0; k < kJetCount; ++k)
    for (int g = 0; g < 4; ++g)
      for (int l = 0; l < 4; ++l) {
        t.w[k][g][l] = 0.0;
        t.idx[k][g][l] = kJetSlots - 1;
      }
  for (const MulTerm& term : kMulTerms) {
    t.w[term.a][term.dst / 4][term.dst % 4] = term.weight;
    t.idx[term.a][term.dst / 4][term.dst % 4] = term.b;
  }
  return t;
}

constexpr MulVecTables kVec = make_vec_tables();

PLATECOL_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

PLATECOL_AVX2 void axpy_avx2(double* dst, double a, const double* x) {
  const __m256d va = _mm256_set1_pd(a);
  for (int g = 0; g < 4; ++g) {
    __m256d d = _mm256_loadu_pd(dst + 4 * g);
    d = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + 4 * g), d);
    _mm256_storeu_pd(dst + 4 * g, d);
  }
}

PLATECOL_AVX2 void scale_avx2(double* dst, double a) {
  const __m256d va = _mm256_set1_pd(a);
  for (int g = 0; g < 4; ++g)
    _mm256_storeu_pd(dst + 4 * g,
                     _mm256_mul_pd(va, _mm256_loadu_pd(dst + 4 * g)));
}

PLATECOL_AVX2 double dot_avx2(const double* a, const double* b) {
  __m256d acc0 = _mm256_mul_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
  __m256d acc1 = _mm256_mul_pd(_mm256_loadu_pd(a + 4), _mm256_loadu_pd(b + 4));
  acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + 8), _mm256_loadu_pd(b + 8), acc0);
  acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + 12), _mm256_loadu_pd(b + 12), acc1);
  return hsum(_mm256_add_pd(acc0, acc1));
}

PLATECOL_AVX2 void mul_avx2(double* out, const double* a, const double* b) {
  __m256d acc[4];
  for (int g = 0; g < 4; ++g) acc[g] = _mm256_setzero_pd();
  for (int k = 0; k < kJetCount; ++k) {
    const __m256d va = _mm256_set1_pd(a[k]);
    for (int g = 0; g < 4; ++g) {
      const __m128i vidx =
          _mm_load_si128(reinterpret_cast<const __m128i*>(kVec.idx[k][g]));
      const __m256d vb = _mm256_i32gather_pd(b, vidx, 8);
      const __m256d vw = _mm256_load_pd(kVec.w[k][g]);
      acc[g] = _mm256_fmadd_pd(_mm256_mul_pd(va, vw), vb, acc[g]);
    }
  }
  for (int g = 0; g < 4; ++g) _mm256_storeu_pd(out + 4 * g, acc[g]);
}

// Correlation used by both halves of the adjoint: for each slot k,
// sum over terms with that slot on the left of w * out_bar[dst] * other[b].
PLATECOL_AVX2 inline void correlate_avx2(double* bar, const double* out_bar,
                                         const double* other) {
  for (int k = 0; k < kJetCount; ++k) {
    __m256d acc = _mm256_setzero_pd();
    for (int g = 0; g < 4; ++g) {
      const __m128i vidx =
          _mm_load_si128(reinterpret_cast<const __m128i*>(kVec.idx[k][g]));
      const __m256d vo = _mm256_i32gather_pd(other, vidx, 8);
      const __m256d vw = _mm256_load_pd(kVec.w[k][g]);
      const __m256d vd = _mm256_loadu_pd(out_bar + 4 * g);
      acc = _mm256_fmadd_pd(_mm256_mul_pd(vw, vd), vo, acc);
    }
    bar[k] += hsum(acc);
  }
}

PLATECOL_AVX2 void mul_adjoint_avx2(double* a_bar, double* b_bar,
                                    const double* out_bar, const double* a,
                                    const double* b) {
  correlate_avx2(a_bar, out_bar, b);
  correlate_avx2(b_bar, out_bar, a);
}

PLATECOL_AVX2 void affine_avx2(double* out, const double* w, const double* bias,
                               const double* in, int n_out, int n_in) {
  for (int j = 0; j < n_out; ++j) {
    const double* wj = w + j * n_in;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    for (int k = 0; k < n_in; ++k) {
      const double* yk = in + k * kJetSlots;
      const __m256d vw = _mm256_set1_pd(wj[k]);
      acc0 = _mm256_fmadd_pd(vw, _mm256_loadu_pd(yk), acc0);
      acc1 = _mm256_fmadd_pd(vw, _mm256_loadu_pd(yk + 4), acc1);
      acc2 = _mm256_fmadd_pd(vw, _mm256_loadu_pd(yk + 8), acc2);
      acc3 = _mm256_fmadd_pd(vw, _mm256_loadu_pd(yk + 12), acc3);
    }
    acc0 = _mm256_add_pd(acc0, _mm256_set_pd(0.0, 0.0, 0.0, bias[j]));
    double* oj = out + j * kJetSlots;
    _mm256_storeu_pd(oj, acc0);
    _mm256_storeu_pd(oj + 4, acc1);
    _mm256_storeu_pd(oj + 8, acc2);
    _mm256_storeu_pd(oj + 12, acc3);
  }
}

PLATECOL_AVX2 void affine_adjoint_input_avx2(double* in_bar, const double* w,
                                             const double* out_bar, int n_out,
                                             int n_in) {
  for (int j = 0; j < n_out; ++j) {
    const double* wj = w + j * n_in;
    const double* oj = out_bar + j * kJetSlots;
    const __m256d o0 = _mm256_loadu_pd(oj);
    const __m256d o1 = _mm256_loadu_pd(oj + 4);
    const __m256d o2 = _mm256_loadu_pd(oj + 8);
    const __m256d o3 = _mm256_loadu_pd(oj + 12);
    for (int k = 0; k < n_in; ++k) {
      double* bk = in_bar + k * kJetSlots;
      const __m256d vw = _mm256_set1_pd(wj[k]);
      _mm256_storeu_pd(bk, _mm256_fmadd_pd(vw, o0, _mm256_loadu_pd(bk)));
      _mm256_storeu_pd(bk + 4, _mm256_fmadd_pd(vw, o1, _mm256_loadu_pd(bk + 4)));
      _mm256_storeu_pd(bk + 8, _mm256_fmadd_pd(vw, o2, _mm256_loadu_pd(bk + 8)));
      _mm256_storeu_pd(bk + 12,
                       _mm256_fmadd_pd(vw, o3, _mm256_loadu_pd(bk + 12)));
    }
  }
}

PLATECOL_AVX2 void affine_param_grads_avx2(double* w_bar, double* bias_bar,
                                           const double* out_bar,
                                           const double* in, int n_out,
                                           int n_in) {
  for (int j = 0; j < n_out; ++j) {
    const double* oj = out_bar + j * kJetSlots;
    const __m256d o0 = _mm256_loadu_pd(oj);
    const __m256d o1 = _mm256_loadu_pd(oj + 4);
    const __m256d o2 = _mm256_loadu_pd(oj + 8);
    const __m256d o3 = _mm256_loadu_pd(oj + 12);
    double* wj = w_bar + j * n_in;
    for (int k = 0; k < n_in; ++k) {
      const double* yk = in + k * kJetSlots;
      __m256d acc = _mm256_mul_pd(o0, _mm256_loadu_pd(yk));
      acc = _mm256_fmadd_pd(o1, _mm256_loadu_pd(yk + 4), acc);
      acc = _mm256_fmadd_pd(o2, _mm256_loadu_pd(yk + 8), acc);
      acc = _mm256_fmadd_pd(o3, _mm256_loadu_pd(yk + 12), acc);
      wj[k] += hsum(acc);
    }
    bias_bar[j] += oj[0];
  }
}

constexpr Table kAvx2Table = {
    "avx2",
    axpy_avx2,
    scale_avx2,
    dot_avx2,
    mul_avx2,
    mul_adjoint_avx2,
    affine_avx2,
    affine_adjoint_input_avx2,
    affine_param_grads_avx2,
};

}  // namespace

const Table* avx2_table() {
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &kAvx2Table;
  return nullptr;
}

}  // namespace platecol::kernels

#else  // non-x86 fallback

namespace platecol::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace platecol::kernels

#endif
