#pragma once

#include <optional>
#include <vector>

#include "ioclqr/matops.hpp"
#include "ioclqr/trajectory.hpp"

namespace ioclqr {

/// Kronecker lift of (A, B) and the derived operators that govern how the
/// state and terminal cost matrices enter the observed feedback:
///   A~ = -I(x)A - A(x)I,   B~ = I(x)B,
///   Gamma_c = [B~, A~B~, ..., A~^(n^2-1) B~]  (lifted controllability matrix),
///   H~ = [B~, A~B~, ..., A~^(n^2) B~]',  N~ = [0, -B~, ..., -A~^(n^2-1) B~]'.
/// H~, N~ and Gamma_c' share one null space. gamma_null holds an orthonormal
/// basis of null(Gamma_c' D_n) in half-vectorization coordinates: the
/// directions along which a symmetric cost perturbation is invisible to the
/// observed feedback.
struct KroneckerBundle {
  Mat A, B;
  Eigen::Index n = 0, m = 0;
  Mat A_tilde;   // n^2 x n^2
  Mat B_tilde;   // n^2 x nm
  Mat Gamma_c;   // n^2 x n^2*nm
  Mat H_tilde;   // (n^2+1)nm x n^2
  Mat N_tilde;   // (n^2+1)nm x n^2
  Mat D_n;       // n^2 x n(n+1)/2
  Mat H_dn;      // H_tilde * D_n
  Mat N_dn;      // N_tilde * D_n
  Mat gamma_null;  // n(n+1)/2 x r, orthonormal
  bool controllable = false;
};

KroneckerBundle build_kron(const Mat& A, const Mat& B, double rank_tol = 1e-8);

/// Cross-validated controllability decision: the classical rank test on
/// [B, AB, ..., A^(n-1)B], the column rank of Gamma_c', and the column rank
/// of Gamma_c' D_n must all agree.
struct ControllabilityReport {
  bool classical = false;
  bool lifted = false;
  bool lifted_dn = false;
  Eigen::Index classical_rank = 0;
  Eigen::Index lifted_rank = 0;
  Eigen::Index lifted_dn_rank = 0;
  bool agree = false;
  std::optional<Vec> witness;  // v with B'(A')^i v = 0 for all i, when uncontrollable

  bool controllable() const { return classical; }
};

ControllabilityReport check_controllability(const Mat& A, const Mat& B,
                                            double rank_tol = 1e-8);

/// Affine family of symmetric matrices, particular + span(basis), optionally
/// intersected with the PSD cone.
struct SymSolutionSpace {
  Mat particular;
  std::vector<Mat> basis;  // symmetric, linearly independent
  bool psd_constraint = true;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis.size()); }
  Mat member(const Vec& coeffs) const;
};

/// All state costs producing the observed feedback when the terminal cost is
/// pinned to the one paired with Q1: Q1 + directions invisible to Gamma_c'.
SymSolutionSpace solution_space_q(const KroneckerBundle& bundle, const Mat& Q1);

/// Same for the terminal cost with the state cost pinned.
SymSolutionSpace solution_space_f(const KroneckerBundle& bundle, const Mat& F1);

struct InvqfOptions {
  double rank_tol = 1e-8;
  double rs_tol = 1e-6;           // R K(t) B symmetry tolerance
  double consistency_tol = 1e-3;  // relative residual allowed in the linear systems
};

/// The costate component determined by (K, R) alone and its derived data:
///   P0(t) = -K'R (RKB)^+ RK,
///   G(t)  = A'P0 + P0 A + P0 B K + P0dot,
///   F0    = P0(tf),
/// the stacked derivative data g(t) with blocks
///   g_0 = 0,  g_k(t) = -sum_{i<k} B~'(A~')^i vec(G^(k-1-i)(t)),
/// and, for controllable systems, the joint-recovery operators
///   M_Q = H~A~'D_n (H_dn'H_dn)^-1 H_dn' N_dn + H_dn,
///   U_Q = H~A~'D_n (H_dn'H_dn)^-1 H_dn',
///   S_Q = -U_Q g(tf) - H~ vec(G(tf)) + gdot(tf).
struct GPipeline {
  MatrixTraj P0;
  MatrixTraj G;
  Mat F0;
  MatrixTraj g;      // (n^2+1)nm x 1 vector trajectory
  Vec g_tf;
  Vec gdot_tf;
  Mat M_Q;           // empty unless the bundle is controllable
  Mat U_Q;
  Vec S_Q;
};

/// Requires R to make R K(t) B symmetric at every node (InconsistencyError
/// otherwise). Derivatives of G are taken with the trajectory module's
/// least-squares stencils; the order reaches n^2, so the practical range is
/// n <= 3 on the default grids.
GPipeline compute_p0_g(const KroneckerBundle& bundle, const MatrixTraj& K,
                       const Mat& R, const InvqfOptions& opts = {});

/// Result of a Q or F recovery: unique matrix, or an affine family plus the
/// outcome of the PSD-member search over it.
struct QfSolution {
  enum class Kind { Unique, Space };
  Kind kind = Kind::Unique;
  Mat matrix;             // unique value, or the particular solution
  SymSolutionSpace space; // populated in the Space case
  Vec lmi_coeffs;         // coefficients of the verified PSD member, if found
  bool lmi_decided = false;
  std::optional<Mat> psd_member;
  double residual = 0.0;  // relative residual of the defining linear system

  bool is_unique() const { return kind == Kind::Unique; }
};

/// State cost from (K, R, F). Unique for controllable (A, B); otherwise the
/// affine family over gamma_null with a PSD member sought by the LMI solver.
QfSolution recover_q_given_rf(const KroneckerBundle& bundle, const MatrixTraj& K,
                              const Mat& R, const Mat& F,
                              const InvqfOptions& opts = {});
QfSolution recover_q_given_rf(const KroneckerBundle& bundle, const GPipeline& pipe,
                              const Mat& F, const InvqfOptions& opts = {});

/// Terminal cost from (K, R, Q); mirrors recover_q_given_rf.
QfSolution recover_f_given_rq(const KroneckerBundle& bundle, const MatrixTraj& K,
                              const Mat& R, const Mat& Q,
                              const InvqfOptions& opts = {});
QfSolution recover_f_given_rq(const KroneckerBundle& bundle, const GPipeline& pipe,
                              const Mat& Q, const InvqfOptions& opts = {});

/// Joint recovery of (Q, F) from (K, R) for controllable (A, B): Q from the
/// M_Q system (unique when M_Q has full column rank, else a family over
/// null(M_Q)), then F from Q.
struct QfPair {
  QfSolution q;
  QfSolution f;
  Eigen::Index mq_rank = 0;
  bool mq_full_rank = false;
  double mq_rank_gap = 0.0;  // ratio of the singular values around the cutoff
};

QfPair recover_qf_given_r(const KroneckerBundle& bundle, const MatrixTraj& K,
                          const Mat& R, const InvqfOptions& opts = {});

/// Independent check of a (K, R, F) triple: fits the state cost by linear
/// least squares through the R-free costate equation (the costate response
/// is affine in Q), then evaluates the Riccati residual
///   Q(t) = -Pdot - A'P - PA + P B R^-1 B' P
/// nodewise. For consistent data Q(t) is constant; the constancy defect
/// measures the mismatch.
struct QOracleResult {
  MatrixTraj q_traj;
  Mat q_mean;
  double constancy_defect = 0.0;
};

QOracleResult oracle_q_sylvester(const Mat& A, const Mat& B, const MatrixTraj& K,
                                 const Mat& R, const Mat& F);

/// True iff R K(t) B is symmetric at every node, within
/// tol * (1 + ||R|| max||K|| ||B||).
bool check_rs_membership(const MatrixTraj& K, const Mat& R, const Mat& B,
                         double tol = 1e-6);

}  // namespace ioclqr
