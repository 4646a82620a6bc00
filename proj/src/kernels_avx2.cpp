// AVX2 kernel variants. Compiled with -mavx2 only on x86-64; the dispatcher
// never calls these unless the CPU reports AVX2.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace lvmrs::kernels::detail {

namespace {

// exp underflows to 0 below this; keeps the 2^n exponent construction in
// the normal range.
constexpr double kExpUnderflow = -708.0;
constexpr double kExpOverflow = 709.0;

// Cephes-style exp: reduce by ln 2 with a hi/lo split, rational expm1
// approximation, scale by 2^n through the exponent bits.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d xc = _mm256_min_pd(
      _mm256_max_pd(x, _mm256_set1_pd(kExpUnderflow)),
      _mm256_set1_pd(kExpOverflow));
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);

  __m256d r = _mm256_sub_pd(xc, _mm256_mul_pd(n, ln2_hi));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, ln2_lo));
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d px = _mm256_add_pd(_mm256_mul_pd(p0, rr), p1);
  px = _mm256_add_pd(_mm256_mul_pd(px, rr), p2);
  px = _mm256_mul_pd(px, r);

  __m256d qx = _mm256_add_pd(_mm256_mul_pd(q0, rr), q1);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q2);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q3);

  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(n64));

  const __m256d under =
      _mm256_cmp_pd(x, _mm256_set1_pd(kExpUnderflow), _CMP_LT_OQ);
  return _mm256_andnot_pd(under, e);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m2 = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m2, _mm_unpackhi_pd(m2, m2)));
}

}  // namespace

double exp_shift_scale_avx2(const double* x, std::size_t n, double shift,
                            double inv_t, double* y) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vinv = _mm256_set1_pd(inv_t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift), vinv);
    const __m256d v = exp4(arg);
    _mm256_storeu_pd(y + i, v);
    acc = _mm256_add_pd(acc, v);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double arg = (x[i] - shift) * inv_t;
    const double v = arg < kExpUnderflow ? 0.0 : std::exp(arg);
    y[i] = v;
    sum += v;
  }
  return sum;
}

void scaled_threshold_avx2(const double* x, std::size_t n, double inv_t,
                           double rho, double* y) {
  const __m256d vinv = _mm256_set1_pd(inv_t);
  const __m256d vrho = _mm256_set1_pd(rho);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_sub_pd(
        _mm256_mul_pd(_mm256_loadu_pd(x + i), vinv), vrho);
    _mm256_storeu_pd(y + i, _mm256_max_pd(v, zero));
  }
  for (; i < n; ++i) y[i] = std::max(x[i] * inv_t - rho, 0.0);
}

void scale_avx2(double* x, std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
  }
  for (; i < n; ++i) x[i] *= s;
}

double reduce_max_avx2(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double reduce_sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

std::size_t argmax_avx2(const double* x, std::size_t n) {
  // Vector max first, then a scalar scan for the first match keeps the
  // lowest-index tie rule exact.
  const double m = reduce_max_avx2(x, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == m) return i;
  }
  return 0;  // unreachable for finite input
}

void welford_row_avx2(double* mean, double* m2, const double* x, std::size_t n,
                      double inv_count) {
  const __m256d vinv = _mm256_set1_pd(inv_count);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x + k);
    __m256d mv = _mm256_loadu_pd(mean + k);
    const __m256d delta = _mm256_sub_pd(xv, mv);
    mv = _mm256_add_pd(mv, _mm256_mul_pd(delta, vinv));
    const __m256d m2v = _mm256_add_pd(
        _mm256_loadu_pd(m2 + k), _mm256_mul_pd(delta, _mm256_sub_pd(xv, mv)));
    _mm256_storeu_pd(mean + k, mv);
    _mm256_storeu_pd(m2 + k, m2v);
  }
  for (; k < n; ++k) {
    const double delta = x[k] - mean[k];
    mean[k] += delta * inv_count;
    m2[k] += delta * (x[k] - mean[k]);
  }
}

}  // namespace lvmrs::kernels::detail

#endif  // x86-64
