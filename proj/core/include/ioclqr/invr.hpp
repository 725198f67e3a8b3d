#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ioclqr/matops.hpp"
#include "ioclqr/trajectory.hpp"

namespace ioclqr {

/// Which recovery route produced an RSolution.
enum class RBranch {
  FullTrajectory,   // integral equations over the whole horizon
  Point,            // single time point, P(t) positive definite
  PointPsd,         // single time point, P(t) positive semi-definite
  Stacked,          // several time points stacked
  TerminalFullRank, // terminal data, rank(FB) = m
  TerminalSpace,    // terminal data, rank(FB) < m, rank(K_f) = rank(B)
  TerminalPsd,      // terminal data, rank(K_f) < rank(B)
};

std::string to_string(RBranch branch);

/// Result of a control-cost recovery: either a unique SPD matrix, or an
/// affine family  R = r_matrix + null_basis * Z * null_basis'  over symmetric
/// Z, intersected with the PD cone. When the PD members admit an explicit
/// characterization, z_condition holds the strict lower bound: the member is
/// PD iff Z - z_condition is PD.
struct RSolution {
  enum class Kind { Unique, Space };

  Kind kind = Kind::Unique;
  Mat r_matrix;                    // unique R, or the particular solution
  Mat null_basis;                  // m x k orthonormal; empty when Unique
  std::optional<Mat> z_condition;  // k x k bound for the free block
  RBranch branch = RBranch::FullTrajectory;
  std::string note;

  bool is_unique() const { return kind == Kind::Unique; }
  Eigen::Index space_dim() const { return null_basis.cols(); }

  /// Member of the affine family for a given symmetric free block Z
  /// (k x k). For Unique solutions Z must be 0 x 0.
  Mat member(const Mat& Z) const;
};

struct InvrOptions {
  double rank_tol = 1e-8;         // relative singular-value cutoff
  double sym_tol = 1e-6;          // relative asymmetry allowed in a unique R
  double consistency_tol = 1e-6;  // relative residual allowed in the defining system
};

/// Data for full-trajectory recovery: the observed feedback gains K(t), the
/// matching costate trajectory P(t) (solved from the known Q, F via the
/// R-free reformulation), and the input matrix B. Grids must agree.
struct RecoveryInput {
  MatrixTraj K;
  MatrixTraj P;
  Mat B;
  InvrOptions opts;

  RecoveryInput(MatrixTraj K_, MatrixTraj P_, Mat B_, InvrOptions opts_ = {});
};

/// Full-trajectory method. Forms L1 = int K K' ds and L2 = int -K P B ds;
/// returns the unique R = L1^-1 L2 when L1 is nonsingular, otherwise the
/// symmetric solution family of L1 R = L2 with the particular solution
///   Rbar = L1^+ L2 + L2' L1^+ - L1^+ L1 L2' L1^+
/// and null_basis = orthonormal basis of null(L1). The PD-member bound
/// (z_condition) is attached whenever the range-block V2' Rbar V2 is PD.
/// Throws InconsistencyError when L1 L1^+ L2 != L2 beyond tolerance or a
/// unique R comes out asymmetric.
RSolution recover_r_full(const RecoveryInput& input);

/// True iff Z - z_condition is PD, which holds iff r_matrix + V Z V' is PD.
/// Both tests are evaluated and must agree whenever both margins exceed
/// margin_tol; disagreement throws std::logic_error.
bool z_condition_check(const RSolution& space, const Mat& Z,
                       double margin_tol = 1e-8);

/// Single-time-point method for P(t) PD: particular solution
///   R0 = -B' P (P B K)^+ P B,
/// unique when rank(B) = m, otherwise a family over null(K') of dimension
/// m - rank(B) whose PD members are R0 + W W' with the columns of W spanning
/// null(K'). Requires the strengthened rank condition
/// rank(KB) = rank(K) = rank(B) at the node.
RSolution recover_r_point(const Mat& K_t, const Mat& P_t, const Mat& B,
                          const InvrOptions& opts = {});

/// Several time points (K_ti, P_ti): recovers R from the stacked system
///   R [K_1 ... K_s] = -B' [P_1' ... P_s']'
/// via the same integral-free algebra as the full method with sums in place
/// of integrals; unique iff the stacked gains have full row rank.
RSolution recover_r_stacked(const std::vector<std::pair<Mat, Mat>>& nodes,
                            const Mat& B, const InvrOptions& opts = {});

/// Single-time-point method for P(t) merely PSD:
///   R2 = -B'P K^+ - (K^+)' P B + (K^+)' K' B' P K^+,
/// family R2 + Y with Y symmetric and K'Y = 0 (dimension m - rank(K)).
RSolution recover_r_psd_point(const Mat& K_t, const Mat& P_t, const Mat& B,
                              const InvrOptions& opts = {});

/// Terminal-data method: B'F = -R K(tf). Branches on rank(FB) and rank(K_f):
/// unique when rank(FB) = m; a W-family when rank(K_f) = rank(B); otherwise
/// the PSD-point family at tf.
RSolution recover_r_from_f(const MatrixTraj& K, const Mat& F, const Mat& B,
                           const InvrOptions& opts = {});

/// Search the affine family for a PD member via the alternating-projection
/// LMI solver. Returns the verified member, or nullopt when the search is
/// undecided within the iteration budget.
std::optional<Mat> find_pd_member(const RSolution& solution,
                                  double tol = 1e-9, int max_iter = 5000);

/// max over grid nodes of ||B'P(t) + R K(t)|| (Frobenius).
double r_residual(const MatrixTraj& K, const MatrixTraj& P, const Mat& B,
                  const Mat& R);

}  // namespace ioclqr
