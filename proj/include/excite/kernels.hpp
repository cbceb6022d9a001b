#pragma once

// Data-parallel inner loops used by trajectory sampling, excitation metrics
// and batch diversity. Each kernel has a scalar reference implementation and
// vectorized variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is
// picked once at runtime from CPU features; tests compare every available
// variant against the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace excite::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b);

/// Backend used by the dispatching entry points below.
Backend active_backend();

/// Backends that can run on this CPU (scalar always included).
std::vector<Backend> available_backends();

/// Overrides the runtime choice; throws ContractError if `b` is unavailable.
/// Not thread-safe with concurrent kernel calls, meant for tests and the CLI.
void force_backend(Backend b);

/// Harmonic coefficients of one joint: sin_coef[l] multiplies cos(omega (l+1) t)
/// in the velocity, cos_coef[l] multiplies sin(omega (l+1) t).
struct HarmonicSeries {
  std::span<const double> sin_coef;
  std::span<const double> cos_coef;
  double omega = 0.0;
};

/// Writes the Fourier part of position, velocity and acceleration of one joint
/// at times t_k = t0 + k*dt, k < n:
///   q   = sum_l  a_l/(w l) sin(w l t) - b_l/(w l) cos(w l t)
///   qd  = sum_l  a_l cos(w l t) + b_l sin(w l t)
///   qdd = sum_l -a_l w l sin(w l t) + b_l w l cos(w l t)
void fourier_series(const HarmonicSeries& series, double t0, double dt,
                    std::span<double> q, std::span<double> qd, std::span<double> qdd);

/// gram += X^T X for a row-major block X (rows x cols, leading dimension ld).
/// `gram` is a full row-major cols x cols matrix; both triangles are updated.
void gram_accumulate(std::span<const double> x, std::size_t rows, std::size_t cols,
                     std::size_t ld, std::span<double> gram);

/// out[i] = || points[i] - query ||^2 for row-major points (n x dim, leading dim ld).
void squared_distances(std::span<const double> query, std::span<const double> points,
                       std::size_t n, std::size_t ld, std::span<double> out);

// Direct access to the individual variants, for equivalence testing.
namespace scalar {
void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd);
void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram);
void squared_distances(const double* query, const double* points, std::size_t n,
                       std::size_t dim, std::size_t ld, double* out);
}  // namespace scalar

namespace avx2 {
void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd);
void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram);
void squared_distances(const double* query, const double* points, std::size_t n,
                       std::size_t dim, std::size_t ld, double* out);
}  // namespace avx2

namespace neon {
void fourier_series(const HarmonicSeries& s, double t0, double dt, std::size_t n, double* q,
                    double* qd, double* qdd);
void gram_accumulate(const double* x, std::size_t rows, std::size_t cols, std::size_t ld,
                     double* gram);
void squared_distances(const double* query, const double* points, std::size_t n,
                       std::size_t dim, std::size_t ld, double* out);
}  // namespace neon

/// Dispatch a variant explicitly (used by tests).
void fourier_series(Backend b, const HarmonicSeries& s, double t0, double dt, std::span<double> q,
                    std::span<double> qd, std::span<double> qdd);
void gram_accumulate(Backend b, std::span<const double> x, std::size_t rows, std::size_t cols,
                     std::size_t ld, std::span<double> gram);
void squared_distances(Backend b, std::span<const double> query, std::span<const double> points,
                       std::size_t n, std::size_t ld, std::span<double> out);

}  // namespace excite::kernels
