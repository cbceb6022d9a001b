#include <cmath>

#include "excite/kernels.hpp"

namespace excite::kernels::scalar {

void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd) {
  const std::size_t h = s.sin_coef.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    double pos = 0.0, vel = 0.0, acc = 0.0;
    for (std::size_t l = 0; l < h; ++l) {
      const double wl = s.omega * static_cast<double>(l + 1);
      const double sn = std::sin(wl * t);
      const double cs = std::cos(wl * t);
      const double a = s.sin_coef[l];
      const double b = s.cos_coef[l];
      pos += (a * sn - b * cs) / wl;
      vel += a * cs + b * sn;
      acc += wl * (b * cs - a * sn);
    }
    q[k] = pos;
    qd[k] = vel;
    qdd[k] = acc;
  }
}

void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram) {
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = i; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rows; ++r) acc += x[r * ld + i] * x[r * ld + j];
      gram[i * cols + j] += acc;
      if (j != i) gram[j * cols + i] += acc;
    }
  }
}

void squared_distances(const double* query, const double* points, std::size_t n,
                       std::size_t dim, std::size_t ld, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * ld;
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = p[d] - query[d];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

}  // namespace excite::kernels::scalar
