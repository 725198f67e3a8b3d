#pragma once

#include <complex>
#include <vector>

#include "ioclqr/matops.hpp"
#include "ioclqr/trajectory.hpp"

namespace ioclqr {

/// A finite-horizon LQR instance: minimize
///   x(tf)' F x(tf) + integral of x'Qx + u'Ru over [t0, tf]
/// subject to xdot = Ax + Bu. Construction validates shapes, m <= n,
/// symmetry, Q and F PSD, R PD, and caches rank(B).
struct LqrProblem {
  Mat A, B, Q, R, F;
  TimeGrid grid;
  Eigen::Index rank_b = 0;

  LqrProblem(Mat A_, Mat B_, Mat Q_, Mat R_, Mat F_, TimeGrid grid_);

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
};

/// Backward solution of the Riccati equation
///   Pdot = -A'P - PA + P B R^-1 B' P - Q,  P(tf) = F,
/// by the classical 4th-order one-step method on the problem grid, with the
/// iterate symmetrized after each step. Throws IntegrationError on blow-up.
MatrixTraj solve_dre(const LqrProblem& p);

/// Optimal feedback K(t) = -R^-1 B' P(t), nodewise. R must be PD.
MatrixTraj feedback(const MatrixTraj& P, const Mat& B, const Mat& R);

/// Backward solution of the R-free reformulation
///   Pdot = -A'P - P(A + B K(t)) - Q,  P(tf) = F,
/// on the grid K lives on. The iterate is NOT symmetrized: symmetry of the
/// result is a structural property of consistent data and is left for the
/// caller to assert.
MatrixTraj solve_sylvester_p(const Mat& A, const Mat& B, const Mat& Q,
                             const Mat& F, const MatrixTraj& K);

/// Per-node record of the eigenstructure conditions on K(t)B that observed
/// feedback data must satisfy for a valid (R, P(t)) pair to exist:
///   A1  K(t)B has m linearly independent real eigenvectors,
///   A2  all eigenvalues of K(t)B are non-positive,
///   A3  rank(K(t)B) = rank(K(t)),
/// plus the strengthened form rank(K(t)B) = rank(K(t)) = rank(B) required
/// for P(t) to be PD.
struct JamesonNode {
  double t = 0.0;
  Eigen::VectorXcd eigenvalues;   // of K(t)B
  double max_imag = 0.0;          // largest |imaginary part|
  double eigvec_cond = 0.0;       // condition number of the eigenvector matrix
  double max_real_eig = 0.0;
  Eigen::Index rank_kb = 0;
  Eigen::Index rank_k = 0;
  bool a1 = false, a2 = false, a3 = false;
  bool strengthened = false;
};

struct JamesonReport {
  std::vector<JamesonNode> nodes;
  Eigen::Index rank_b = 0;
  bool all_a1 = true, all_a2 = true, all_a3 = true, all_strengthened = true;
  int worst_node = -1;  // first node failing any of A1-A3, or -1

  bool pass() const { return all_a1 && all_a2 && all_a3; }
};

/// Evaluate A1-A3 and the strengthened rank condition at every node of K.
/// Never throws on a failed condition; the report carries the failures.
JamesonReport check_jameson(const MatrixTraj& K, const Mat& B, double tol = 1e-8);

/// Structure checks relating BK to KB at one node: equal rank, spectra equal
/// up to zero-padding, BK diagonalizable.
struct BkStructureReport {
  Eigen::Index rank_bk = 0;
  Eigen::Index rank_kb = 0;
  bool ranks_match = false;
  bool spectra_match = false;
  double spectrum_gap = 0.0;  // Hausdorff-style gap between padded spectra
  bool diagonalizable = false;
  double eigvec_cond = 0.0;

  bool pass() const { return ranks_match && spectra_match && diagonalizable; }
};

BkStructureReport check_bk_structure(const Mat& K_t, const Mat& B,
                                     double tol = 1e-8);

/// Closed-loop rollout of xdot = (A + B K(t)) x from x0, with u = Kx
/// recorded at the nodes.
struct SimResult {
  MatrixTraj x;  // n x 1
  MatrixTraj u;  // m x 1
  Vec x0;
};

SimResult simulate(const LqrProblem& p, const MatrixTraj& K, const Vec& x0);

}  // namespace ioclqr
