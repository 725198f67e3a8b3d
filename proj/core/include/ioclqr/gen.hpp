#pragma once

#include <cstdint>
#include <random>

#include "ioclqr/forward.hpp"
#include "ioclqr/matops.hpp"

namespace ioclqr {

/// Deterministic, portable random source: mt19937_64 (whose output sequence
/// the standard pins down exactly) with 53-bit uniforms and Box-Muller
/// normals, so the draws do not depend on any library's distribution
/// implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (consumes two uniforms per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// r x c matrix of standard normals, filled row by row.
Mat randn(Rng& rng, Eigen::Index r, Eigen::Index c);

/// D'D + shift*I with D r x r standard normal.
Mat random_spd(Rng& rng, Eigen::Index r, double shift = 1.0);

/// Synthesis recipe for ground-truth instances:
///   A = randn(n,n)/n,  B = randn(n,m) (or a rank-limited product),
///   Q = C'C + q_shift*I,  R = D'D + I,  F = E'E or 0.
/// Uncontrollable instances use a block structure with an unreachable lower
/// block, verified by the classical rank test.
struct GenOptions {
  int n = 2;
  int m = 1;
  bool controllable = true;
  int rank_b = -1;  // -1: full column rank
  double t0 = 0.0;
  double tf = 2.0;
  int n_steps = 2000;
  enum class FMode { Full, Zero } f_mode = FMode::Full;
  double q_shift = 0.0;
};

struct GeneratedInstance {
  LqrProblem problem;
  MatrixTraj K;
  MatrixTraj P;
};

/// Builds the instance and solves the forward problem. Identical seeds and
/// options produce identical instances. Throws std::invalid_argument for an
/// infeasible flag combination.
GeneratedInstance generate_instance(std::uint64_t seed, const GenOptions& opts);

}  // namespace ioclqr
