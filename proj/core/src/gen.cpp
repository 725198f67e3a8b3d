#include "ioclqr/gen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ioclqr/invqf.hpp"

namespace ioclqr {

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Mat randn(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Mat out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = rng.normal();
  }
  return out;
}

Mat random_spd(Rng& rng, Eigen::Index r, double shift) {
  const Mat d = randn(rng, r, r);
  return d.transpose() * d + shift * Mat::Identity(r, r);
}

namespace {

bool classically_controllable(const Mat& A, const Mat& B) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Mat ctrb(n, n * m);
  Mat power = B;
  for (Eigen::Index j = 0; j < n; ++j) {
    ctrb.block(0, j * m, n, m) = power;
    power = A * power;
  }
  return rank_of(ctrb) == n;
}

}  // namespace

GeneratedInstance generate_instance(std::uint64_t seed, const GenOptions& opts) {
  if (opts.m < 1 || opts.n < opts.m) {
    throw std::invalid_argument("generate_instance: need 1 <= m <= n");
  }
  const int rank_b = opts.rank_b < 0 ? opts.m : opts.rank_b;
  if (rank_b < 1 || rank_b > opts.m) {
    throw std::invalid_argument("generate_instance: rank_b must be in [1, m]");
  }

  Rng rng(seed);
  const Eigen::Index n = opts.n;
  const Eigen::Index m = opts.m;

  Mat A, B;
  if (opts.controllable) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      A = randn(rng, n, n) / static_cast<double>(n);
      B = rank_b == m ? randn(rng, n, m)
                      : Mat(randn(rng, n, rank_b) * randn(rng, rank_b, m));
      if (classically_controllable(A, B)) break;
      if (attempt == 63) {
        throw std::invalid_argument(
            "generate_instance: failed to draw a controllable pair");
      }
    }
  } else {
    // Unreachable lower block: A block-diagonal, B supported on the top
    // block. Needs at least one spare state dimension beyond rank(B1).
    const Eigen::Index k = n - 1;
    if (k < m) {
      throw std::invalid_argument(
          "generate_instance: uncontrollable structure needs m <= n - 1");
    }
    A = Mat::Zero(n, n);
    A.topLeftCorner(k, k) = randn(rng, k, k) / static_cast<double>(n);
    A.bottomRightCorner(n - k, n - k) =
        randn(rng, n - k, n - k) / static_cast<double>(n);
    B = Mat::Zero(n, m);
    B.topRows(k) = rank_b == m
                       ? randn(rng, k, m)
                       : Mat(randn(rng, k, rank_b) * randn(rng, rank_b, m));
    if (classically_controllable(A, B)) {
      throw std::invalid_argument(
          "generate_instance: uncontrollable construction failed rank check");
    }
  }

  const Mat C = randn(rng, n, n);
  const Mat Q = C.transpose() * C + opts.q_shift * Mat::Identity(n, n);
  const Mat R = random_spd(rng, m, 1.0);
  Mat F = Mat::Zero(n, n);
  if (opts.f_mode == GenOptions::FMode::Full) {
    const Mat E = randn(rng, n, n);
    F = E.transpose() * E;
  }

  LqrProblem problem(A, B, Q, R, F, TimeGrid(opts.t0, opts.tf, opts.n_steps));
  MatrixTraj P = solve_dre(problem);
  MatrixTraj K = feedback(P, problem.B, problem.R);
  return GeneratedInstance{std::move(problem), std::move(K), std::move(P)};
}

}  // namespace ioclqr
