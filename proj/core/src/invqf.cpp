#include "ioclqr/invqf.hpp"

#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"
#include "ioclqr/forward.hpp"
#include "ioclqr/lmi.hpp"

namespace ioclqr {

KroneckerBundle build_kron(const Mat& A, const Mat& B, double rank_tol) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n || B.rows() != n) {
    throw std::invalid_argument("build_kron: A must be n x n and B n x m");
  }
  KroneckerBundle out;
  out.A = A;
  out.B = B;
  out.n = n;
  out.m = m;

  const Mat id_n = Mat::Identity(n, n);
  out.A_tilde = -kron(id_n, A) - kron(A, id_n);
  out.B_tilde = kron(id_n, B);
  out.D_n = duplication_matrix(n);

  const Eigen::Index n2 = n * n;
  const Eigen::Index nm = n * m;

  // Powers A~^j B~ for j = 0..n^2 drive every derived operator.
  std::vector<Mat> pow_b(n2 + 1);
  pow_b[0] = out.B_tilde;
  for (Eigen::Index j = 1; j <= n2; ++j) pow_b[j] = out.A_tilde * pow_b[j - 1];

  out.Gamma_c.resize(n2, n2 * nm);
  for (Eigen::Index j = 0; j < n2; ++j) {
    out.Gamma_c.block(0, j * nm, n2, nm) = pow_b[j];
  }

  out.H_tilde.resize((n2 + 1) * nm, n2);
  out.N_tilde.setZero((n2 + 1) * nm, n2);
  for (Eigen::Index j = 0; j <= n2; ++j) {
    out.H_tilde.block(j * nm, 0, nm, n2) = pow_b[j].transpose();
    if (j >= 1) {
      out.N_tilde.block(j * nm, 0, nm, n2) = -pow_b[j - 1].transpose();
    }
  }
  out.H_dn = out.H_tilde * out.D_n;
  out.N_dn = out.N_tilde * out.D_n;

  const Mat gamma_dn = out.Gamma_c.transpose() * out.D_n;
  out.gamma_null = null_range_bases(gamma_dn, rank_tol).null_basis;
  out.controllable = rank_of(out.Gamma_c, rank_tol) == n2;
  return out;
}

ControllabilityReport check_controllability(const Mat& A, const Mat& B,
                                            double rank_tol) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  ControllabilityReport report;

  Mat classical(n, n * m);
  Mat power = B;
  for (Eigen::Index j = 0; j < n; ++j) {
    classical.block(0, j * m, n, m) = power;
    power = A * power;
  }
  report.classical_rank = rank_of(classical, rank_tol);
  report.classical = report.classical_rank == n;

  const KroneckerBundle bundle = build_kron(A, B, rank_tol);
  report.lifted_rank = rank_of(bundle.Gamma_c, rank_tol);
  report.lifted = report.lifted_rank == n * n;
  report.lifted_dn_rank = rank_of(bundle.Gamma_c.transpose() * bundle.D_n, rank_tol);
  report.lifted_dn = report.lifted_dn_rank == n * (n + 1) / 2;

  report.agree = report.classical == report.lifted &&
                 report.lifted == report.lifted_dn;
  if (!report.classical) {
    const Mat null_basis = null_range_bases(classical.transpose(), rank_tol).null_basis;
    if (null_basis.cols() > 0) report.witness = Vec(null_basis.col(0));
  }
  return report;
}

Mat SymSolutionSpace::member(const Vec& coeffs) const {
  if (coeffs.size() != dim()) {
    throw std::invalid_argument("SymSolutionSpace::member: coefficient count");
  }
  Mat out = particular;
  for (Eigen::Index i = 0; i < dim(); ++i) out += coeffs(i) * basis[i];
  return out;
}

namespace {

SymSolutionSpace space_from_gamma_null(const KroneckerBundle& bundle,
                                       const Mat& particular) {
  SymSolutionSpace space;
  space.particular = particular;
  space.psd_constraint = true;
  for (Eigen::Index i = 0; i < bundle.gamma_null.cols(); ++i) {
    space.basis.push_back(sym_from_halfvec(bundle.gamma_null.col(i), bundle.n));
  }
  return space;
}

// PSD-member search over a SymSolutionSpace via the LMI solver. Fills the
// solution's lmi fields.
void attach_psd_member(QfSolution& sol) {
  AffineLmi prob;
  prob.m0 = symmetrize(sol.space.particular);
  prob.basis = sol.space.basis;
  LmiOptions opts;
  const LmiResult result = lmi_feasible(prob, opts);
  sol.lmi_decided = result.feasible;
  if (result.feasible) {
    sol.lmi_coeffs = result.alpha;
    sol.psd_member = result.member;
  }
}

}  // namespace

SymSolutionSpace solution_space_q(const KroneckerBundle& bundle, const Mat& Q1) {
  return space_from_gamma_null(bundle, require_symmetric(Q1));
}

SymSolutionSpace solution_space_f(const KroneckerBundle& bundle, const Mat& F1) {
  return space_from_gamma_null(bundle, require_symmetric(F1));
}

bool check_rs_membership(const MatrixTraj& K, const Mat& R, const Mat& B,
                         double tol) {
  double worst = 0.0;
  double k_norm = 0.0;
  for (int i = 0; i < K.n_nodes(); ++i) {
    const Mat rkb = R * K.sample(i) * B;
    worst = std::max(worst, (rkb - rkb.transpose()).norm());
    k_norm = std::max(k_norm, K.sample(i).norm());
  }
  return worst <= tol * (1.0 + R.norm() * k_norm * B.norm());
}

GPipeline compute_p0_g(const KroneckerBundle& bundle, const MatrixTraj& K,
                       const Mat& R, const InvqfOptions& opts) {
  const Eigen::Index n = bundle.n;
  const Eigen::Index m = bundle.m;
  if (K.rows() != m || K.cols() != n) {
    throw std::invalid_argument("compute_p0_g: K must be m x n");
  }
  if (!check_rs_membership(K, R, bundle.B, opts.rs_tol)) {
    throw InconsistencyError(
        "compute_p0_g: R K(t) B is not symmetric along the trajectory; "
        "R is not an admissible control cost for this data");
  }

  // P0(t) = -K'R (RKB)^+ RK with the pseudoinverse truncated at the node's
  // rank of K(t)B, keeping the decomposition consistent with the observed
  // rank structure.
  const MatrixTraj P0 = K.map([&](const Mat& Kt) -> Mat {
    const Mat RK = R * Kt;
    const Mat RKB = RK * bundle.B;
    const Eigen::Index rank = rank_of(Kt * bundle.B, opts.rank_tol);
    return symmetrize(-Kt.transpose() * R * pinv_with_rank(RKB, rank) * RK);
  });

  const Eigen::Index n2 = n * n;
  const Eigen::Index nm = n * m;

  // G and its derivatives are assembled from direct derivatives of P0 and
  // P0BK rather than by repeatedly differentiating G itself: every stencil
  // then acts on machine-accurate samples instead of already-differentiated
  // ones, which matters at the orders Theorem-style recovery needs.
  const MatrixTraj P0BK = MatrixTraj::zip(
      P0, K, [&](const Mat& p, const Mat& k) -> Mat { return p * bundle.B * k; });

  std::vector<MatrixTraj> p0_derivs;  // P0^(j), j = 0..n^2
  p0_derivs.reserve(n2 + 1);
  p0_derivs.push_back(P0);
  for (Eigen::Index j = 1; j <= n2; ++j) p0_derivs.push_back(P0.derivative(static_cast<int>(j)));

  std::vector<MatrixTraj> p0bk_derivs;  // (P0BK)^(j), j = 0..n^2-1
  p0bk_derivs.reserve(n2);
  p0bk_derivs.push_back(P0BK);
  for (Eigen::Index j = 1; j < n2; ++j) p0bk_derivs.push_back(P0BK.derivative(static_cast<int>(j)));

  const Mat At = bundle.A.transpose();
  std::vector<MatrixTraj> g_derivs;  // G^(j), j = 0..n^2-1
  g_derivs.reserve(n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    const MatrixTraj& pj = p0_derivs[j];
    const MatrixTraj& pj1 = p0_derivs[j + 1];
    const MatrixTraj& bkj = p0bk_derivs[j];
    std::vector<Mat> samples;
    samples.reserve(K.n_nodes());
    for (int i = 0; i < K.n_nodes(); ++i) {
      samples.push_back(At * pj.sample(i) + pj.sample(i) * bundle.A +
                        bkj.sample(i) + pj1.sample(i));
    }
    g_derivs.emplace_back(K.grid(), std::move(samples));
  }

  // W_i = B~'(A~')^i, the maps from vec(G^(j)) into the stacked blocks.
  std::vector<Mat> w(n2);
  w[0] = bundle.B_tilde.transpose();
  for (Eigen::Index i = 1; i < n2; ++i) w[i] = w[i - 1] * bundle.A_tilde.transpose();

  const Eigen::Index g_len = (n2 + 1) * nm;
  std::vector<Mat> g_samples;
  g_samples.reserve(K.n_nodes());
  for (int node = 0; node < K.n_nodes(); ++node) {
    Mat g = Mat::Zero(g_len, 1);
    for (Eigen::Index k = 1; k <= n2; ++k) {
      Vec block = Vec::Zero(nm);
      for (Eigen::Index i = 0; i < k; ++i) {
        block -= w[i] * vec(g_derivs[k - 1 - i].sample(node));
      }
      g.block(k * nm, 0, nm, 1) = block;
    }
    g_samples.push_back(std::move(g));
  }

  GPipeline pipe{P0,
                 g_derivs[0],
                 P0.sample(P0.n_nodes() - 1),
                 MatrixTraj(K.grid(), std::move(g_samples)),
                 Vec(),
                 Vec(),
                 Mat(),
                 Mat(),
                 Vec()};
  pipe.g_tf = Vec(pipe.g.sample(pipe.g.n_nodes() - 1).col(0));
  const MatrixTraj gdot = pipe.g.derivative(1);
  pipe.gdot_tf = Vec(gdot.sample(gdot.n_nodes() - 1).col(0));

  if (bundle.controllable) {
    // (H_dn'H_dn)^-1 H_dn' realized through an orthogonal decomposition.
    const Mat h_pinv = pinv(bundle.H_dn, opts.rank_tol);
    const Mat had = bundle.H_tilde * bundle.A_tilde.transpose() * bundle.D_n;
    pipe.M_Q = had * h_pinv * bundle.N_dn + bundle.H_dn;
    pipe.U_Q = had * h_pinv;
    pipe.S_Q = -pipe.U_Q * pipe.g_tf -
               bundle.H_tilde * vec(pipe.G.sample(pipe.G.n_nodes() - 1)) +
               pipe.gdot_tf;
  }
  return pipe;
}

namespace {

// Shared body of the Q and F recoveries: solve  lhs * x = rhs  for the
// half-vectorized unknown, uniquely when lhs has full column rank, otherwise
// as minimum-norm particular + gamma_null family.
QfSolution solve_halfvec_system(const KroneckerBundle& bundle, const Mat& lhs,
                                const Vec& rhs, const Mat& offset,
                                const InvqfOptions& opts, const char* which) {
  QfSolution sol;
  const Vec x = pinv(lhs, opts.rank_tol) * rhs;
  const double resid = (lhs * x - rhs).norm();
  const double scale = 1.0 + rhs.norm();
  sol.residual = resid / scale;
  if (sol.residual > opts.consistency_tol) {
    throw InconsistencyError(std::string(which) +
                             ": defining linear system is unsolvable (relative "
                             "residual " +
                             std::to_string(sol.residual) +
                             "); observation and supplied costs disagree");
  }
  const Mat particular = offset + sym_from_halfvec(x, bundle.n);
  if (bundle.controllable) {
    sol.kind = QfSolution::Kind::Unique;
    sol.matrix = particular;
  } else {
    sol.kind = QfSolution::Kind::Space;
    sol.matrix = particular;
    sol.space = space_from_gamma_null(bundle, particular);
    attach_psd_member(sol);
  }
  return sol;
}

}  // namespace

QfSolution recover_q_given_rf(const KroneckerBundle& bundle, const GPipeline& pipe,
                              const Mat& F, const InvqfOptions& opts) {
  const Mat Fs = require_symmetric(F);
  if (!is_psd(Fs)) {
    throw std::invalid_argument("recover_q_given_rf: F must be symmetric PSD");
  }
  const Vec y_f = halfvec(Fs - pipe.F0);
  const Vec rhs = -(bundle.H_dn * y_f + pipe.g_tf);
  return solve_halfvec_system(bundle, bundle.N_dn, rhs,
                              Mat::Zero(bundle.n, bundle.n), opts,
                              "recover_q_given_rf");
}

QfSolution recover_q_given_rf(const KroneckerBundle& bundle, const MatrixTraj& K,
                              const Mat& R, const Mat& F, const InvqfOptions& opts) {
  return recover_q_given_rf(bundle, compute_p0_g(bundle, K, R, opts), F, opts);
}

QfSolution recover_f_given_rq(const KroneckerBundle& bundle, const GPipeline& pipe,
                              const Mat& Q, const InvqfOptions& opts) {
  const Mat Qs = require_symmetric(Q);
  if (!is_psd(Qs)) {
    throw std::invalid_argument("recover_f_given_rq: Q must be symmetric PSD");
  }
  const Vec rhs = -(bundle.N_dn * halfvec(Qs) + pipe.g_tf);
  return solve_halfvec_system(bundle, bundle.H_dn, rhs, pipe.F0, opts,
                              "recover_f_given_rq");
}

QfSolution recover_f_given_rq(const KroneckerBundle& bundle, const MatrixTraj& K,
                              const Mat& R, const Mat& Q, const InvqfOptions& opts) {
  return recover_f_given_rq(bundle, compute_p0_g(bundle, K, R, opts), Q, opts);
}

QfPair recover_qf_given_r(const KroneckerBundle& bundle, const MatrixTraj& K,
                          const Mat& R, const InvqfOptions& opts) {
  if (!bundle.controllable) {
    throw std::invalid_argument(
        "recover_qf_given_r: joint recovery requires a controllable system");
  }
  const GPipeline pipe = compute_p0_g(bundle, K, R, opts);

  QfPair pair;
  const Eigen::Index cols = pipe.M_Q.cols();
  Eigen::JacobiSVD<Mat> svd(pipe.M_Q);
  const Vec& sv = svd.singularValues();
  pair.mq_rank = rank_of(pipe.M_Q, opts.rank_tol);
  pair.mq_full_rank = pair.mq_rank == cols;
  pair.mq_rank_gap =
      sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;

  if (pair.mq_full_rank) {
    const Vec q = pinv(pipe.M_Q, opts.rank_tol) * pipe.S_Q;
    pair.q.kind = QfSolution::Kind::Unique;
    pair.q.matrix = sym_from_halfvec(q, bundle.n);
    pair.q.residual =
        (pipe.M_Q * q - pipe.S_Q).norm() / (1.0 + pipe.S_Q.norm());
  } else {
    const Vec q = pinv(pipe.M_Q, opts.rank_tol) * pipe.S_Q;
    pair.q.kind = QfSolution::Kind::Space;
    pair.q.matrix = sym_from_halfvec(q, bundle.n);
    pair.q.residual =
        (pipe.M_Q * q - pipe.S_Q).norm() / (1.0 + pipe.S_Q.norm());
    const Mat null_basis = null_range_bases(pipe.M_Q, opts.rank_tol).null_basis;
    pair.q.space.particular = pair.q.matrix;
    pair.q.space.psd_constraint = true;
    for (Eigen::Index i = 0; i < null_basis.cols(); ++i) {
      pair.q.space.basis.push_back(sym_from_halfvec(null_basis.col(i), bundle.n));
    }
    attach_psd_member(pair.q);
  }

  // Terminal cost from the recovered state cost (unique: the system is
  // controllable). Prefer the PSD member when the state cost came as a space.
  const Mat q_for_f = pair.q.is_unique()
                          ? pair.q.matrix
                          : (pair.q.psd_member ? *pair.q.psd_member : pair.q.matrix);
  Mat q_psd = symmetrize(q_for_f);
  // Guard the PSD precondition of the F-step against numerical dust in Q.
  if (!is_psd(q_psd)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(q_psd);
    q_psd = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
            es.eigenvectors().transpose();
  }
  pair.f = recover_f_given_rq(bundle, pipe, q_psd, opts);
  return pair;
}

QOracleResult oracle_q_sylvester(const Mat& A, const Mat& B, const MatrixTraj& K,
                                 const Mat& R, const Mat& F) {
  const Eigen::Index n = A.rows();
  const Eigen::Index nhalf = n * (n + 1) / 2;

  // The costate solved from the R-free reformulation is affine in (Q, F):
  // fit Q by least squares against B'P(t) = -R K(t) over all nodes, using
  // one solve per symmetric basis direction.
  const Mat zero_q = Mat::Zero(n, n);
  const MatrixTraj p_offset = solve_sylvester_p(A, B, zero_q, F, K);
  std::vector<MatrixTraj> responses;
  responses.reserve(nhalf);
  for (Eigen::Index k = 0; k < nhalf; ++k) {
    Vec e = Vec::Zero(nhalf);
    e(k) = 1.0;
    const Mat Qk = sym_from_halfvec(e, n);
    MatrixTraj pk = solve_sylvester_p(A, B, Qk, Mat::Zero(n, n), K);
    responses.push_back(std::move(pk));
  }

  Mat normal = Mat::Zero(nhalf, nhalf);
  Vec rhs = Vec::Zero(nhalf);
  const Mat Bt = B.transpose();
  for (int i = 0; i < K.n_nodes(); ++i) {
    Mat cols(B.cols() * n, nhalf);
    for (Eigen::Index k = 0; k < nhalf; ++k) {
      cols.col(k) = vec(Bt * responses[k].sample(i));
    }
    const Vec target = vec(Mat(-R * K.sample(i) - Bt * p_offset.sample(i)));
    normal += cols.transpose() * cols;
    rhs += cols.transpose() * target;
  }
  const Vec q_fit = normal.ldlt().solve(rhs);

  // Assemble the fitted costate and evaluate the Riccati residual nodewise.
  std::vector<Mat> p_samples;
  p_samples.reserve(K.n_nodes());
  for (int i = 0; i < K.n_nodes(); ++i) {
    Mat p = p_offset.sample(i);
    for (Eigen::Index k = 0; k < nhalf; ++k) p += q_fit(k) * responses[k].sample(i);
    p_samples.push_back(std::move(p));
  }
  const MatrixTraj P(K.grid(), std::move(p_samples));
  const MatrixTraj Pdot = P.derivative(1);

  const Mat rinv_bt = Mat(R).llt().solve(Bt);
  const Mat At = A.transpose();
  std::vector<Mat> q_samples;
  q_samples.reserve(K.n_nodes());
  Mat q_sum = Mat::Zero(n, n);
  for (int i = 0; i < K.n_nodes(); ++i) {
    const Mat& p = P.sample(i);
    Mat q = -Pdot.sample(i) - At * p - p * A + p * B * rinv_bt * p;
    q_sum += q;
    q_samples.push_back(std::move(q));
  }
  QOracleResult out{MatrixTraj(K.grid(), std::move(q_samples)),
                    q_sum / K.n_nodes(), 0.0};
  for (int i = 0; i < K.n_nodes(); ++i) {
    out.constancy_defect =
        std::max(out.constancy_defect, (out.q_traj.sample(i) - out.q_mean).norm());
  }
  return out;
}

}  // namespace ioclqr
