#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "excite/kernels.hpp"
#include "excite/rng.hpp"

namespace k = excite::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, excite::Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST(Kernels, ScalarFourierMatchesClosedForm) {
  excite::Rng rng(2);
  const auto a = random_vector(5, rng), b = random_vector(5, rng);
  const double w = 2.0 * std::numbers::pi / 16.0, t0 = 0.3, dt = 0.01;
  constexpr std::size_t n = 37;
  std::vector<double> q(n), qd(n), qdd(n);
  k::fourier_series(k::Backend::scalar, {a, b, w}, t0, dt, q, qd, qdd);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    double eq = 0, eqd = 0, eqdd = 0;
    for (int l = 0; l < 5; ++l) {
      const double wl = w * (l + 1);
      eq += a[l] / wl * std::sin(wl * t) - b[l] / wl * std::cos(wl * t);
      eqd += a[l] * std::cos(wl * t) + b[l] * std::sin(wl * t);
      eqdd += -a[l] * wl * std::sin(wl * t) + b[l] * wl * std::cos(wl * t);
    }
    EXPECT_NEAR(q[i], eq, 1e-12);
    EXPECT_NEAR(qd[i], eqd, 1e-12);
    EXPECT_NEAR(qdd[i], eqdd, 1e-12);
  }
}

TEST(Kernels, VariantsAgreeWithScalar) {
  excite::Rng rng(11);
  for (k::Backend backend : k::available_backends()) {
    SCOPED_TRACE(std::string(k::backend_name(backend)));
    // Odd sizes exercise the remainder loops.
    for (std::size_t n : {1u, 3u, 4u, 7u, 1601u}) {
      const auto a = random_vector(6, rng), b = random_vector(6, rng);
      std::vector<double> q0(n), qd0(n), qdd0(n), q1(n), qd1(n), qdd1(n);
      k::fourier_series(k::Backend::scalar, {a, b, 0.39}, 0.0, 0.01, q0, qd0, qdd0);
      k::fourier_series(backend, {a, b, 0.39}, 0.0, 0.01, q1, qd1, qdd1);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(q0[i], q1[i], 1e-10);
        EXPECT_NEAR(qd0[i], qd1[i], 1e-10);
        EXPECT_NEAR(qdd0[i], qdd1[i], 1e-10);
      }
    }
    for (std::size_t cols : {1u, 5u, 21u, 57u}) {
      const std::size_t rows = 13, ld = cols + 3;
      const auto x = random_vector(rows * ld, rng);
      std::vector<double> g0(cols * cols, 0.5), g1(cols * cols, 0.5);
      k::gram_accumulate(k::Backend::scalar, x, rows, cols, ld, g0);
      k::gram_accumulate(backend, x, rows, cols, ld, g1);
      for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          double ref = 0.5;
          for (std::size_t r = 0; r < rows; ++r) ref += x[r * ld + i] * x[r * ld + j];
          EXPECT_NEAR(g0[i * cols + j], ref, 1e-12);
          EXPECT_NEAR(g1[i * cols + j], ref, 1e-12);
        }
      }
    }
    for (std::size_t dim : {1u, 3u, 8u, 21u}) {
      const std::size_t n = 9, ld = dim + 1;
      const auto pts = random_vector(n * ld, rng), query = random_vector(dim, rng);
      std::vector<double> d0(n), d1(n);
      k::squared_distances(k::Backend::scalar, query, pts, n, ld, d0);
      k::squared_distances(backend, query, pts, n, ld, d1);
      for (std::size_t i = 0; i < n; ++i) {
        double ref = 0;
        for (std::size_t c = 0; c < dim; ++c) ref += std::pow(pts[i * ld + c] - query[c], 2);
        EXPECT_NEAR(d0[i], ref, 1e-12);
        EXPECT_NEAR(d1[i], ref, 1e-12);
      }
    }
  }
}

TEST(Kernels, ForceBackendRoundTrip) {
  const k::Backend before = k::active_backend();
  k::force_backend(k::Backend::scalar);
  EXPECT_EQ(k::active_backend(), k::Backend::scalar);
  k::force_backend(before);
  EXPECT_EQ(k::active_backend(), before);
}

TEST(Kernels, UndersizedBufferThrows) {
  std::vector<double> q(2), qd(2), qdd(1);
  std::vector<double> a{1.0};
  EXPECT_THROW(k::fourier_series({a, a, 1.0}, 0.0, 0.1, q, qd, qdd), std::invalid_argument);
}
