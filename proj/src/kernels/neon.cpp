// AArch64 variants. NEON is part of the AArch64 baseline, so no runtime check.

#include <arm_neon.h>

#include <cmath>
#include <vector>

#include "excite/kernels.hpp"

namespace excite::kernels::neon {

void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd) {
  const std::size_t h = s.sin_coef.size();
  std::size_t k = 0;
  double s1[2];
  double c1[2];
  for (; k + 2 <= n; k += 2) {
    for (int lane = 0; lane < 2; ++lane) {
      const double t = t0 + static_cast<double>(k + lane) * dt;
      s1[lane] = std::sin(s.omega * t);
      c1[lane] = std::cos(s.omega * t);
    }
    const float64x2_t vs1 = vld1q_f64(s1);
    const float64x2_t vc1 = vld1q_f64(c1);
    float64x2_t sn = vs1;
    float64x2_t cs = vc1;
    float64x2_t pos = vdupq_n_f64(0.0);
    float64x2_t vel = vdupq_n_f64(0.0);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t l = 0; l < h; ++l) {
      const double wl = s.omega * static_cast<double>(l + 1);
      const float64x2_t a = vdupq_n_f64(s.sin_coef[l]);
      const float64x2_t b = vdupq_n_f64(s.cos_coef[l]);
      const float64x2_t as = vmulq_f64(a, sn);
      const float64x2_t bc = vmulq_f64(b, cs);
      pos = vfmaq_f64(pos, vsubq_f64(as, bc), vdupq_n_f64(1.0 / wl));
      vel = vaddq_f64(vel, vfmaq_f64(vmulq_f64(b, sn), a, cs));
      acc = vfmaq_f64(acc, vsubq_f64(bc, as), vdupq_n_f64(wl));
      const float64x2_t next_sn = vfmaq_f64(vmulq_f64(cs, vs1), sn, vc1);
      const float64x2_t next_cs = vfmsq_f64(vmulq_f64(cs, vc1), sn, vs1);
      sn = next_sn;
      cs = next_cs;
    }
    vst1q_f64(q + k, pos);
    vst1q_f64(qd + k, vel);
    vst1q_f64(qdd + k, acc);
  }
  if (k < n) {
    scalar::fourier_series(s, t0 + static_cast<double>(k) * dt, dt, n - k, q + k, qd + k,
                           qdd + k);
  }
}

void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram) {
  std::vector<double> upper(cols * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * ld;
    for (std::size_t i = 0; i < cols; ++i) {
      const float64x2_t bi = vdupq_n_f64(xr[i]);
      double* g = upper.data() + i * cols;
      std::size_t j = i;
      for (; j + 2 <= cols; j += 2) {
        vst1q_f64(g + j, vfmaq_f64(vld1q_f64(g + j), bi, vld1q_f64(xr + j)));
      }
      for (; j < cols; ++j) g[j] += xr[i] * xr[j];
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
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t d = 0;
    for (; d + 2 <= dim; d += 2) {
      const float64x2_t diff = vsubq_f64(vld1q_f64(p + d), vld1q_f64(query + d));
      acc = vfmaq_f64(acc, diff, diff);
    }
    double total = vaddvq_f64(acc);
    for (; d < dim; ++d) {
      const double diff = p[d] - query[d];
      total += diff * diff;
    }
    out[i] = total;
  }
}

}  // namespace excite::kernels::neon
