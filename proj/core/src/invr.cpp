#include "ioclqr/invr.hpp"

#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"
#include "ioclqr/lmi.hpp"

namespace ioclqr {

std::string to_string(RBranch branch) {
  switch (branch) {
    case RBranch::FullTrajectory: return "full-trajectory";
    case RBranch::Point: return "point";
    case RBranch::PointPsd: return "point-psd";
    case RBranch::Stacked: return "stacked";
    case RBranch::TerminalFullRank: return "terminal-full-rank";
    case RBranch::TerminalSpace: return "terminal-space";
    case RBranch::TerminalPsd: return "terminal-psd";
  }
  return "unknown";
}

Mat RSolution::member(const Mat& Z) const {
  if (Z.rows() != space_dim() || Z.cols() != space_dim()) {
    throw std::invalid_argument("RSolution::member: Z must be k x k");
  }
  if (space_dim() == 0) return r_matrix;
  return r_matrix + null_basis * Z * null_basis.transpose();
}

RecoveryInput::RecoveryInput(MatrixTraj K_, MatrixTraj P_, Mat B_, InvrOptions opts_)
    : K(std::move(K_)), P(std::move(P_)), B(std::move(B_)), opts(opts_) {
  if (!(K.grid() == P.grid())) {
    throw std::invalid_argument("RecoveryInput: K and P must share one grid");
  }
  if (P.rows() != P.cols() || K.cols() != P.rows() || B.rows() != P.rows() ||
      B.cols() != K.rows()) {
    throw std::invalid_argument("RecoveryInput: inconsistent shapes");
  }
}

namespace {

// Symmetric solution set of L1 R = L2, where L1 is symmetric PSD. Shared by
// the full-trajectory and stacked methods (which differ only in whether the
// Gram data comes from quadrature or from a finite sum of nodes).
RSolution solve_symmetric_gram_system(const Mat& L1, const Mat& L2,
                                      RBranch branch, const InvrOptions& opts) {
  const Eigen::Index m = L1.rows();
  RSolution out;
  out.branch = branch;

  if (rank_of(L1, opts.rank_tol) == m) {
    Mat R = L1.ldlt().solve(L2);
    const double asym = (R - R.transpose()).norm();
    if (asym > opts.sym_tol * (1.0 + R.norm())) {
      throw InconsistencyError("recover_r: unique solution is asymmetric (" +
                               std::to_string(asym) + "); data is inconsistent");
    }
    out.kind = RSolution::Kind::Unique;
    out.r_matrix = symmetrize(R);
    out.null_basis = Mat(m, 0);
    return out;
  }

  const Mat L1p = pinv(L1, opts.rank_tol);
  const double consistency = (L1 * (L1p * L2) - L2).norm();
  if (consistency > opts.consistency_tol * (1.0 + L2.norm())) {
    throw InconsistencyError("recover_r: L1 R = L2 is unsolvable (residual " +
                             std::to_string(consistency) + "); data is corrupted");
  }

  // Symmetric particular solution of the singular system.
  const Mat Rbar = L1p * L2 + L2.transpose() * L1p - L1p * L1 * L2.transpose() * L1p;

  const BasisPair bases = null_range_bases(L1, opts.rank_tol);
  out.kind = RSolution::Kind::Space;
  out.r_matrix = symmetrize(Rbar);
  out.null_basis = bases.null_basis;

  // PD members exist iff the free block exceeds an explicit Schur bound;
  // that bound is well defined whenever the range block V2' Rbar V2 is PD.
  const Mat& V1 = bases.null_basis;
  const Mat& V2 = bases.range_basis;
  if (V2.cols() > 0) {
    const Mat range_block = symmetrize(V2.transpose() * out.r_matrix * V2);
    if (lambda_min_sym(range_block) > 0.0) {
      const Mat cross = V1.transpose() * out.r_matrix * V2;
      out.z_condition = symmetrize(cross * range_block.llt().solve(cross.transpose()) -
                                   V1.transpose() * out.r_matrix * V1);
    }
  } else if (V1.cols() == m) {
    // L1 = 0: every symmetric matrix solves the system; Z alone must be PD.
    out.z_condition = Mat::Zero(m, m);
  }
  return out;
}

void check_node_residual(const Mat& K_t, const Mat& P_t, const Mat& B,
                         const Mat& R, const InvrOptions& opts,
                         const char* which) {
  const double resid = (B.transpose() * P_t + R * K_t).norm();
  const double scale = 1.0 + R.norm() * K_t.norm() + (B.transpose() * P_t).norm();
  if (resid > opts.consistency_tol * scale) {
    throw InconsistencyError(std::string(which) +
                             ": candidate fails B'P = -RK at the node (residual " +
                             std::to_string(resid) + ")");
  }
}

}  // namespace

RSolution recover_r_full(const RecoveryInput& input) {
  const MatrixTraj& K = input.K;
  const MatrixTraj& P = input.P;

  const MatrixTraj kk = K.map([](const Mat& k) -> Mat { return k * k.transpose(); });
  const MatrixTraj kpb = MatrixTraj::zip(
      K, P, [&](const Mat& k, const Mat& p) -> Mat { return -k * p * input.B; });

  const Mat L1 = symmetrize(kk.integrate());
  const Mat L2 = kpb.integrate();
  return solve_symmetric_gram_system(L1, L2, RBranch::FullTrajectory, input.opts);
}

bool z_condition_check(const RSolution& space, const Mat& Z, double margin_tol) {
  if (space.kind != RSolution::Kind::Space) {
    throw std::invalid_argument("z_condition_check: solution is not a space");
  }
  if (!space.z_condition.has_value()) {
    throw std::invalid_argument(
        "z_condition_check: no explicit PD bound is attached to this space");
  }
  if (Z.rows() != space.space_dim() || Z.cols() != space.space_dim()) {
    throw std::invalid_argument("z_condition_check: Z has the wrong block size");
  }

  const double schur_margin = lambda_min_sym(Z - *space.z_condition);
  const double direct_margin = lambda_min_sym(space.member(symmetrize(Z)));
  const bool schur_pd = schur_margin > 0.0;
  const bool direct_pd = direct_margin > 0.0;
  if (schur_pd != direct_pd && std::abs(schur_margin) > margin_tol &&
      std::abs(direct_margin) > margin_tol) {
    throw std::logic_error(
        "z_condition_check: Schur bound and direct eigenvalue test disagree");
  }
  return schur_pd;
}

RSolution recover_r_point(const Mat& K_t, const Mat& P_t, const Mat& B,
                          const InvrOptions& opts) {
  if (!is_psd(P_t) || lambda_min_sym(P_t) <= 0.0) {
    throw std::invalid_argument(
        "recover_r_point: P(t) is not positive definite; use recover_r_psd_point");
  }
  const Eigen::Index m = B.cols();
  const Eigen::Index rank_b = rank_of(B, opts.rank_tol);
  const Eigen::Index rank_kb = rank_of(K_t * B, opts.rank_tol);
  const Eigen::Index rank_k = rank_of(K_t, opts.rank_tol);
  if (rank_kb != rank_k || rank_kb != rank_b) {
    throw InconsistencyError(
        "recover_r_point: rank(KB) = rank(K) = rank(B) fails at this node");
  }

  const Mat PBK = P_t * B * K_t;
  const Mat R0 = symmetrize(-B.transpose() * P_t * pinv_with_rank(PBK, rank_kb) *
                            P_t * B);
  check_node_residual(K_t, P_t, B, R0, opts, "recover_r_point");

  RSolution out;
  out.branch = RBranch::Point;
  out.r_matrix = R0;
  if (rank_b == m) {
    out.kind = RSolution::Kind::Unique;
    out.null_basis = Mat(m, 0);
  } else {
    out.kind = RSolution::Kind::Space;
    out.null_basis = null_range_bases(K_t.transpose(), opts.rank_tol).null_basis;
    out.note = "PD members are R0 + W W' with the columns of W spanning null(K')";
  }
  return out;
}

RSolution recover_r_stacked(const std::vector<std::pair<Mat, Mat>>& nodes,
                            const Mat& B, const InvrOptions& opts) {
  if (nodes.empty()) {
    throw std::invalid_argument("recover_r_stacked: need at least one node");
  }
  const Eigen::Index m = nodes.front().first.rows();
  Mat L1 = Mat::Zero(m, m);
  Mat L2 = Mat::Zero(m, m);
  for (const auto& [K_t, P_t] : nodes) {
    if (K_t.rows() != m) {
      throw std::invalid_argument("recover_r_stacked: inconsistent gain shapes");
    }
    L1 += K_t * K_t.transpose();
    L2 += -K_t * P_t * B;
  }
  L1 = symmetrize(L1);
  return solve_symmetric_gram_system(L1, L2, RBranch::Stacked, opts);
}

RSolution recover_r_psd_point(const Mat& K_t, const Mat& P_t, const Mat& B,
                              const InvrOptions& opts) {
  if (!is_psd(P_t)) {
    throw std::invalid_argument("recover_r_psd_point: P(t) must be symmetric PSD");
  }
  const Mat Kp = pinv(K_t, opts.rank_tol);
  const Mat BtP = B.transpose() * P_t;
  const Mat R2 = symmetrize(-BtP * Kp - Kp.transpose() * P_t * B +
                            Kp.transpose() * K_t.transpose() * BtP * Kp);
  check_node_residual(K_t, P_t, B, R2, opts, "recover_r_psd_point");

  RSolution out;
  out.branch = RBranch::PointPsd;
  out.kind = RSolution::Kind::Space;
  out.r_matrix = R2;
  out.null_basis = null_range_bases(K_t.transpose(), opts.rank_tol).null_basis;
  if (out.null_basis.cols() == 0) {
    out.kind = RSolution::Kind::Unique;
  }
  return out;
}

RSolution recover_r_from_f(const MatrixTraj& K, const Mat& F, const Mat& B,
                           const InvrOptions& opts) {
  const Mat Fs = require_symmetric(F);
  if (!is_psd(Fs)) {
    throw std::invalid_argument("recover_r_from_f: F must be symmetric PSD");
  }
  const Mat K_f = K.sample(K.n_nodes() - 1);
  const Eigen::Index m = B.cols();
  const Eigen::Index rank_fb = rank_of(Fs * B, opts.rank_tol);
  const Eigen::Index rank_b = rank_of(B, opts.rank_tol);
  const Eigen::Index rank_kf = rank_of(K_f, opts.rank_tol);

  if (rank_fb == m) {
    const Mat FB = Fs * B;
    const Mat R0 = symmetrize(-B.transpose() * Fs * pinv(FB * K_f, opts.rank_tol) *
                              FB);
    check_node_residual(K_f, Fs, B, R0, opts, "recover_r_from_f");
    RSolution out;
    out.branch = RBranch::TerminalFullRank;
    out.kind = RSolution::Kind::Unique;
    out.r_matrix = R0;
    out.null_basis = Mat(m, 0);
    return out;
  }

  if (rank_kf == rank_b) {
    const Mat FB = Fs * B;
    const Mat R1 = symmetrize(-B.transpose() * Fs * pinv(FB * K_f, opts.rank_tol) *
                              FB);
    check_node_residual(K_f, Fs, B, R1, opts, "recover_r_from_f");
    RSolution out;
    out.branch = RBranch::TerminalSpace;
    out.kind = RSolution::Kind::Space;
    out.r_matrix = R1;
    out.null_basis = null_range_bases(K_f.transpose(), opts.rank_tol).null_basis;
    out.note = "PD members are R1 + W W' with the columns of W spanning null(K_f')";
    return out;
  }

  RSolution out = recover_r_psd_point(K_f, Fs, B, opts);
  out.branch = RBranch::TerminalPsd;
  return out;
}

std::optional<Mat> find_pd_member(const RSolution& solution, double tol,
                                  int max_iter) {
  const Eigen::Index m = solution.r_matrix.rows();
  if (solution.space_dim() == 0) {
    if (lambda_min_sym(solution.r_matrix) > 0.0) return solution.r_matrix;
    return std::nullopt;
  }

  // Affine family over the symmetric free block: one basis matrix per
  // independent entry of Z.
  const Mat& V = solution.null_basis;
  const Eigen::Index k = V.cols();
  AffineLmi prob;
  prob.m0 = solution.r_matrix;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = j; i < k; ++i) {
      Mat E = Mat::Zero(k, k);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      prob.basis.push_back(V * E * V.transpose());
    }
  }
  LmiOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.pd_margin = 1e-6 * (1.0 + solution.r_matrix.norm());
  const LmiResult result = lmi_feasible(prob, opts);
  if (!result.feasible) return std::nullopt;
  return result.member;
}

double r_residual(const MatrixTraj& K, const MatrixTraj& P, const Mat& B,
                  const Mat& R) {
  double worst = 0.0;
  for (int i = 0; i < K.n_nodes(); ++i) {
    worst = std::max(
        worst, (B.transpose() * P.sample(i) + R * K.sample(i)).norm());
  }
  return worst;
}

}  // namespace ioclqr
