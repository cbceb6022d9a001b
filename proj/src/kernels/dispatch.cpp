#include <atomic>
#include <cstdlib>
#include <string>

#include "excite/error.hpp"
#include "excite/kernels.hpp"

namespace excite::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(EXCITE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
    case Backend::neon:
#if defined(EXCITE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect() {
  // EXCITE_KERNELS=scalar pins the reference path (handy when bisecting).
  if (const char* env = std::getenv("EXCITE_KERNELS"); env && std::string(env) == "scalar") {
    return Backend::scalar;
  }
  if (supported(Backend::avx2)) return Backend::avx2;
  if (supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

void check_sizes(std::size_t got, std::size_t need, const char* what) {
  if (got < need) {
    throw ContractError(std::string("kernels: buffer too small for ") + what);
  }
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (supported(Backend::avx2)) out.push_back(Backend::avx2);
  if (supported(Backend::neon)) out.push_back(Backend::neon);
  return out;
}

void force_backend(Backend b) {
  if (!supported(b)) {
    throw ContractError("kernel backend '" + std::string(backend_name(b)) +
                        "' is not available on this CPU/build");
  }
  current().store(b, std::memory_order_relaxed);
}

void fourier_series(Backend b, const HarmonicSeries& s, double t0, double dt, std::span<double> q,
                    std::span<double> qd, std::span<double> qdd) {
  if (s.sin_coef.size() != s.cos_coef.size()) {
    throw ContractError("fourier_series: sine/cosine coefficient counts differ");
  }
  const std::size_t n = q.size();
  check_sizes(qd.size(), n, "velocity");
  check_sizes(qdd.size(), n, "acceleration");
  switch (b) {
#if defined(EXCITE_HAVE_AVX2)
    case Backend::avx2:
      avx2::fourier_series(s, t0, dt, n, q.data(), qd.data(), qdd.data());
      return;
#endif
#if defined(EXCITE_HAVE_NEON)
    case Backend::neon:
      neon::fourier_series(s, t0, dt, n, q.data(), qd.data(), qdd.data());
      return;
#endif
    default:
      scalar::fourier_series(s, t0, dt, n, q.data(), qd.data(), qdd.data());
  }
}

void gram_accumulate(Backend b, std::span<const double> x, std::size_t rows, std::size_t cols,
                     std::size_t ld, std::span<double> gram) {
  if (ld < cols) throw ContractError("gram_accumulate: leading dimension < cols");
  if (rows > 0) check_sizes(x.size(), (rows - 1) * ld + cols, "input rows");
  check_sizes(gram.size(), cols * cols, "gram");
  switch (b) {
#if defined(EXCITE_HAVE_AVX2)
    case Backend::avx2:
      avx2::gram_accumulate(x.data(), rows, cols, ld, gram.data());
      return;
#endif
#if defined(EXCITE_HAVE_NEON)
    case Backend::neon:
      neon::gram_accumulate(x.data(), rows, cols, ld, gram.data());
      return;
#endif
    default:
      scalar::gram_accumulate(x.data(), rows, cols, ld, gram.data());
  }
}

void squared_distances(Backend b, std::span<const double> query, std::span<const double> points,
                       std::size_t n, std::size_t ld, std::span<double> out) {
  const std::size_t dim = query.size();
  if (ld < dim) throw ContractError("squared_distances: leading dimension < dim");
  if (n > 0) check_sizes(points.size(), (n - 1) * ld + dim, "points");
  check_sizes(out.size(), n, "output");
  switch (b) {
#if defined(EXCITE_HAVE_AVX2)
    case Backend::avx2:
      avx2::squared_distances(query.data(), points.data(), n, dim, ld, out.data());
      return;
#endif
#if defined(EXCITE_HAVE_NEON)
    case Backend::neon:
      neon::squared_distances(query.data(), points.data(), n, dim, ld, out.data());
      return;
#endif
    default:
      scalar::squared_distances(query.data(), points.data(), n, dim, ld, out.data());
  }
}

void fourier_series(const HarmonicSeries& s, double t0, double dt, std::span<double> q,
                    std::span<double> qd, std::span<double> qdd) {
  fourier_series(active_backend(), s, t0, dt, q, qd, qdd);
}

void gram_accumulate(std::span<const double> x, std::size_t rows, std::size_t cols,
                     std::size_t ld, std::span<double> gram) {
  gram_accumulate(active_backend(), x, rows, cols, ld, gram);
}

void squared_distances(std::span<const double> query, std::span<const double> points,
                       std::size_t n, std::size_t ld, std::span<double> out) {
  squared_distances(active_backend(), query, points, n, ld, out);
}

}  // namespace excite::kernels
