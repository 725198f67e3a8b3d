#pragma once

#include "ioclqr/matops.hpp"
#include "ioclqr/trajectory.hpp"

namespace ioclqr {

/// Auxiliary time-varying regulator built from the data of a recovery
/// problem: state zdot = K(t) v with state dimension m and input dimension n,
/// terminal cost F_bar = R, running costs Q_bar(t) = B'P(t)B and
/// R_bar(t) = P(t). Well defined when B and K(t) have full rank throughout,
/// which makes both running costs PD at every node.
struct AuxProblem {
  MatrixTraj K;       // m x n, the auxiliary input matrix
  Mat F_bar;          // = R
  MatrixTraj Q_bar;   // m x m, PD nodewise
  MatrixTraj R_bar;   // n x n, PD nodewise (= P)
  Eigen::Index state_dim = 0;  // m
  Eigen::Index input_dim = 0;  // n
};

/// Validates the full-rank standing assumptions (rank(B) = m, rank(K(t)) = m
/// and rank(K(t)B) = m at every node, P(t) PD) and assembles the auxiliary
/// problem. Throws std::invalid_argument on a rank or definiteness failure.
AuxProblem build_aux(const MatrixTraj& K, const MatrixTraj& P, const Mat& R,
                     const Mat& B, double tol = 1e-8);

/// Outcome of integrating the auxiliary Riccati equation
///   Pbar_dot = Pbar K(t) P(t)^-1 K(t)' Pbar - Q_bar(t),  Pbar(tf) = R,
/// and checking the structural claims: Pbar(t) stays equal to R, and the
/// auxiliary optimal feedback -R_bar(t)^-1 K(t)' Pbar(t) equals B.
struct DualityReport {
  MatrixTraj P_bar;
  double max_p_dev = 0.0;   // max_t ||Pbar(t) - R||
  double max_fb_dev = 0.0;  // max_t ||feedback(t) - B||
  int worst_p_node = -1;
  int worst_fb_node = -1;
  bool p_bar_constant = false;
  bool feedback_matches = false;
  bool cond_warning = false;  // some node had cond(P) above the guard

  bool pass() const { return p_bar_constant && feedback_matches; }
};

DualityReport verify_duality(const AuxProblem& aux, const Mat& B, const Mat& R,
                             double tol = 1e-5);

}  // namespace ioclqr
