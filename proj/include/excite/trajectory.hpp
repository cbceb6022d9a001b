#pragma once

// Modified-Fourier cyclic trajectories.
//
// Per joint j:
//   q_j(t) = q0_j + sum_{l=1..H} [ a_jl/(w l) sin(w l t) - b_jl/(w l) cos(w l t) ] + p_j(t)
// with w = 2 pi / T and p_j the quintic that makes q(0) = q(T) = q0_j and
// qd = qdd = 0 at both ends. Coefficients are stored flat, index
// (j * H + l) * 2 + k with k = 0 for a (sine term of position) and k = 1 for b.

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "excite/chain.hpp"

namespace excite {

inline constexpr int kDefaultHarmonics = 6;
inline constexpr double kDefaultDuration = 16.0;
inline constexpr double kDefaultRateHz = 100.0;

/// Quintic segment p(t) = sum c_k t^k on [0, T].
struct Quintic {
  std::array<double, 6> c{};

  /// Unique quintic with the given position/velocity/acceleration at 0 and T.
  static Quintic boundary(double x0, double v0, double a0, double x1, double v1, double a1,
                          double duration);

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

class FourierTrajectory {
 public:
  FourierTrajectory() = default;

  int joints() const { return joints_; }
  int harmonics() const { return harmonics_; }
  double duration() const { return duration_; }
  double omega() const;

  /// Flat J x H x 2 tensor.
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  const Quintic& correction(int joint) const { return correction_[joint]; }

  double sine_coef(int j, int l) const { return coeffs_[(j * harmonics_ + l) * 2]; }
  double cosine_coef(int j, int l) const { return coeffs_[(j * harmonics_ + l) * 2 + 1]; }

  /// Analytic state at time t (no sampling).
  JointState state_at(double t) const;

 private:
  friend FourierTrajectory build_trajectory(const Eigen::VectorXd&, const Eigen::VectorXd&, int,
                                            double);
  int joints_ = 0;
  int harmonics_ = 0;
  double duration_ = 0.0;
  Eigen::VectorXd coeffs_;
  Eigen::VectorXd offsets_;
  std::vector<Quintic> correction_;
};

/// coeffs has length J*H*2 with J = offsets.size(). Throws ContractError on
/// shape mismatch or non-finite input.
FourierTrajectory build_trajectory(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& offsets,
                                   int harmonics, double duration);

struct Segment {
  enum class Kind { trajectory, bridge };
  Kind kind = Kind::trajectory;
  std::size_t first = 0;  // first sample index
  std::size_t count = 0;
  int source = -1;  // index of the trajectory in the concatenation input
};

/// Dense samples; row k of q/qd/qdd is the state at sample k.
struct SampledTrajectory {
  double dt = 0.0;
  Eigen::MatrixXd q;
  Eigen::MatrixXd qd;
  Eigen::MatrixXd qdd;
  std::string source;
  std::vector<Segment> segments;

  std::size_t size() const { return static_cast<std::size_t>(q.rows()); }
  int joints() const { return static_cast<int>(q.cols()); }
  JointState state(std::size_t k) const;
};

/// n = round(T * rate_hz) samples on the closed interval [0, T], so
/// dt = T / (n - 1) and the first and last samples are the two rest ends.
SampledTrajectory sample(const FourierTrajectory& traj, double rate_hz);

/// Joins trajectories in order. Equal consecutive offsets join directly; a
/// rest-to-rest quintic bridge (interior samples only, duration rounded up to
/// the sampling grid and sized from the joint velocity/acceleration limits)
/// is inserted otherwise. Throws NumericalError naming the joint when a
/// bridge cannot respect the model limits.
SampledTrajectory concatenate(std::span<const FourierTrajectory> trajs, double rate_hz,
                              const RobotModel& model);

/// Minimum duration of a rest-to-rest quintic covering `distance` under limits.
double bridge_duration(double distance, double qd_max, double qdd_max);

}  // namespace excite
