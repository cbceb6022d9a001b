// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "excite/kernels.hpp"

namespace excite::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd) {
  const std::size_t h = s.sin_coef.size();
  std::size_t k = 0;
  alignas(32) double s1[4];
  alignas(32) double c1[4];
  for (; k + 4 <= n; k += 4) {
    for (int lane = 0; lane < 4; ++lane) {
      const double t = t0 + static_cast<double>(k + lane) * dt;
      s1[lane] = std::sin(s.omega * t);
      c1[lane] = std::cos(s.omega * t);
    }
    const __m256d vs1 = _mm256_load_pd(s1);
    const __m256d vc1 = _mm256_load_pd(c1);
    __m256d sn = vs1;
    __m256d cs = vc1;
    __m256d pos = _mm256_setzero_pd();
    __m256d vel = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t l = 0; l < h; ++l) {
      const double wl = s.omega * static_cast<double>(l + 1);
      const __m256d a = _mm256_set1_pd(s.sin_coef[l]);
      const __m256d b = _mm256_set1_pd(s.cos_coef[l]);
      const __m256d as = _mm256_mul_pd(a, sn);
      const __m256d bc = _mm256_mul_pd(b, cs);
      pos = _mm256_fmadd_pd(_mm256_sub_pd(as, bc), _mm256_set1_pd(1.0 / wl), pos);
      vel = _mm256_add_pd(vel, _mm256_fmadd_pd(a, cs, _mm256_mul_pd(b, sn)));
      acc = _mm256_fmadd_pd(_mm256_sub_pd(bc, as), _mm256_set1_pd(wl), acc);
      // angle addition: sin((l+1)x), cos((l+1)x) from sin(lx), cos(lx)
      const __m256d next_sn = _mm256_fmadd_pd(sn, vc1, _mm256_mul_pd(cs, vs1));
      const __m256d next_cs = _mm256_fmsub_pd(cs, vc1, _mm256_mul_pd(sn, vs1));
      sn = next_sn;
      cs = next_cs;
    }
    _mm256_storeu_pd(q + k, pos);
    _mm256_storeu_pd(qd + k, vel);
    _mm256_storeu_pd(qdd + k, acc);
  }
  if (k < n) {
    scalar::fourier_series(s, t0 + static_cast<double>(k) * dt, dt, n - k, q + k, qd + k,
                           qdd + k);
  }
}

void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram) {
  std::vector<double> upper(cols * cols, 0.0);
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* x0 = x + r * ld;
    const double* x1 = x0 + ld;
    const double* x2 = x1 + ld;
    const double* x3 = x2 + ld;
    for (std::size_t i = 0; i < cols; ++i) {
      const __m256d b0 = _mm256_set1_pd(x0[i]);
      const __m256d b1 = _mm256_set1_pd(x1[i]);
      const __m256d b2 = _mm256_set1_pd(x2[i]);
      const __m256d b3 = _mm256_set1_pd(x3[i]);
      double* g = upper.data() + i * cols;
      std::size_t j = i;
      for (; j + 4 <= cols; j += 4) {
        __m256d acc = _mm256_loadu_pd(g + j);
        acc = _mm256_fmadd_pd(b0, _mm256_loadu_pd(x0 + j), acc);
        acc = _mm256_fmadd_pd(b1, _mm256_loadu_pd(x1 + j), acc);
        acc = _mm256_fmadd_pd(b2, _mm256_loadu_pd(x2 + j), acc);
        acc = _mm256_fmadd_pd(b3, _mm256_loadu_pd(x3 + j), acc);
        _mm256_storeu_pd(g + j, acc);
      }
      for (; j < cols; ++j) {
        g[j] += x0[i] * x0[j] + x1[i] * x1[j] + x2[i] * x2[j] + x3[i] * x3[j];
      }
    }
  }
  for (; r < rows; ++r) {
    const double* xr = x + r * ld;
    for (std::size_t i = 0; i < cols; ++i) {
      double* g = upper.data() + i * cols;
      for (std::size_t j = i; j < cols; ++j) g[j] += xr[i] * xr[j];
    }
  }
  for (std::size_t i = 0; i < cols; ++i) {
    gram[i * cols + i] += upper[i * cols + i];
    for (std::size_t j = i + 1; j < cols; ++j) {
      gram[i * cols + j] += upper[i * cols + j];
      gram[j * cols + i] += upper[i * cols + j];
    }
  }
}

void squared_distances(const double* query, const double* points, std::size_t n,
                       std::size_t dim, std::size_t ld, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * ld;
    __m256d acc = _mm256_setzero_pd();
    std::size_t d = 0;
    for (; d + 4 <= dim; d += 4) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(p + d), _mm256_loadu_pd(query + d));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    double total = hsum(acc);
    for (; d < dim; ++d) {
      const double diff = p[d] - query[d];
      total += diff * diff;
    }
    out[i] = total;
  }
}

}  // namespace excite::kernels::avx2
