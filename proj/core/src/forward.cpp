#include "ioclqr/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"

namespace ioclqr {

namespace {

constexpr double kBlowupNorm = 1e12;

// Classical 4th-order one-step integration backward in time, landing exactly
// on the grid nodes. rhs(t, X) evaluates Xdot.
template <typename Rhs>
std::vector<Mat> rk4_backward(const TimeGrid& grid, const Mat& terminal,
                              const Rhs& rhs, bool symmetrize_step) {
  const int n_nodes = grid.n_nodes();
  const double h = grid.h();
  std::vector<Mat> out(n_nodes);
  out[n_nodes - 1] = terminal;
  Mat x = terminal;
  for (int i = n_nodes - 1; i > 0; --i) {
    const double t = grid.node(i);
    const double hs = -h;  // stepping toward t0
    const Mat k1 = rhs(t, x);
    const Mat k2 = rhs(t + 0.5 * hs, x + 0.5 * hs * k1);
    const Mat k3 = rhs(t + 0.5 * hs, x + 0.5 * hs * k2);
    const Mat k4 = rhs(t + hs, x + hs * k3);
    x = x + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (symmetrize_step) x = symmetrize(x);
    if (!x.allFinite() || x.norm() > kBlowupNorm) {
      throw IntegrationError("backward integration diverged near t = " +
                             std::to_string(t + hs));
    }
    out[i - 1] = x;
  }
  return out;
}

template <typename Rhs>
std::vector<Mat> rk4_forward(const TimeGrid& grid, const Mat& initial,
                             const Rhs& rhs) {
  const int n_nodes = grid.n_nodes();
  const double h = grid.h();
  std::vector<Mat> out(n_nodes);
  out[0] = initial;
  Mat x = initial;
  for (int i = 0; i < n_nodes - 1; ++i) {
    const double t = grid.node(i);
    const Mat k1 = rhs(t, x);
    const Mat k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Mat k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Mat k4 = rhs(t + h, x + h * k3);
    x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.norm() > kBlowupNorm) {
      throw IntegrationError("forward integration diverged near t = " +
                             std::to_string(t + h));
    }
    out[i + 1] = x;
  }
  return out;
}

}  // namespace

LqrProblem::LqrProblem(Mat A_, Mat B_, Mat Q_, Mat R_, Mat F_, TimeGrid grid_)
    : A(std::move(A_)),
      B(std::move(B_)),
      Q(std::move(Q_)),
      R(std::move(R_)),
      F(std::move(F_)),
      grid(grid_) {
  const Eigen::Index nn = A.rows();
  const Eigen::Index mm = B.cols();
  if (A.cols() != nn) throw std::invalid_argument("LqrProblem: A must be square");
  if (B.rows() != nn) throw std::invalid_argument("LqrProblem: B row count must match A");
  if (mm > nn) throw std::invalid_argument("LqrProblem: m must be <= n");
  if (Q.rows() != nn || Q.cols() != nn) throw std::invalid_argument("LqrProblem: Q must be n x n");
  if (F.rows() != nn || F.cols() != nn) throw std::invalid_argument("LqrProblem: F must be n x n");
  if (R.rows() != mm || R.cols() != mm) throw std::invalid_argument("LqrProblem: R must be m x m");
  if (!is_psd(Q)) throw std::invalid_argument("LqrProblem: Q must be symmetric PSD");
  if (!is_psd(F)) throw std::invalid_argument("LqrProblem: F must be symmetric PSD");
  if (!is_pd(R, 1e-12)) throw std::invalid_argument("LqrProblem: R must be symmetric PD");
  Q = symmetrize(Q);
  F = symmetrize(F);
  R = symmetrize(R);
  rank_b = rank_of(B);
}

MatrixTraj solve_dre(const LqrProblem& p) {
  const Mat rinv_bt = p.R.llt().solve(p.B.transpose());
  const Mat at = p.A.transpose();
  auto rhs = [&](double, const Mat& P) -> Mat {
    return -at * P - P * p.A + P * p.B * rinv_bt * P - p.Q;
  };
  return MatrixTraj(p.grid, rk4_backward(p.grid, p.F, rhs, /*symmetrize_step=*/true));
}

MatrixTraj feedback(const MatrixTraj& P, const Mat& B, const Mat& R) {
  Eigen::LLT<Mat> llt(symmetrize(R));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("feedback: R must be symmetric positive definite");
  }
  const Mat bt = B.transpose();
  return P.map([&](const Mat& p) -> Mat { return -llt.solve(bt * p); });
}

MatrixTraj solve_sylvester_p(const Mat& A, const Mat& B, const Mat& Q,
                             const Mat& F, const MatrixTraj& K) {
  const Mat at = A.transpose();
  auto rhs = [&](double t, const Mat& P) -> Mat {
    return -at * P - P * (A + B * K.eval(t)) - Q;
  };
  return MatrixTraj(K.grid(), rk4_backward(K.grid(), F, rhs, /*symmetrize_step=*/false));
}

JamesonReport check_jameson(const MatrixTraj& K, const Mat& B, double tol) {
  JamesonReport report;
  report.rank_b = rank_of(B);
  report.nodes.reserve(K.n_nodes());
  constexpr double kCondLimit = 1e8;  // diagonalizability proxy

  for (int i = 0; i < K.n_nodes(); ++i) {
    const Mat& Kt = K.sample(i);
    const Mat KB = Kt * B;
    JamesonNode node;
    node.t = K.grid().node(i);
    node.rank_kb = rank_of(KB);
    node.rank_k = rank_of(Kt);

    const double scale = 1.0 + KB.norm();
    Eigen::EigenSolver<Mat> es(KB);
    node.eigenvalues = es.eigenvalues();
    node.max_imag = node.eigenvalues.imag().cwiseAbs().maxCoeff();
    node.max_real_eig = node.eigenvalues.real().maxCoeff();

    // Condition of the eigenvector matrix; exact diagonalizability is not
    // numerically decidable, so a large condition number stands in for a
    // defective eigenvector set.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    node.eigvec_cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    node.a1 = node.max_imag <= tol * scale && node.eigvec_cond <= kCondLimit;
    node.a2 = node.max_real_eig <= tol * scale;
    node.a3 = node.rank_kb == node.rank_k;
    node.strengthened = node.a3 && node.rank_kb == report.rank_b;

    report.all_a1 = report.all_a1 && node.a1;
    report.all_a2 = report.all_a2 && node.a2;
    report.all_a3 = report.all_a3 && node.a3;
    report.all_strengthened = report.all_strengthened && node.strengthened;
    if (report.worst_node < 0 && !(node.a1 && node.a2 && node.a3)) {
      report.worst_node = i;
    }
    report.nodes.push_back(std::move(node));
  }
  return report;
}

BkStructureReport check_bk_structure(const Mat& K_t, const Mat& B, double tol) {
  BkStructureReport report;
  const Mat KB = K_t * B;
  const Mat BK = B * K_t;
  report.rank_kb = rank_of(KB);
  report.rank_bk = rank_of(BK);
  report.ranks_match = report.rank_kb == report.rank_bk;

  // Spectrum of BK should be the spectrum of KB padded with n - m zeros.
  Eigen::EigenSolver<Mat> es_bk(BK);
  Eigen::EigenSolver<Mat> es_kb(KB);
  std::vector<std::complex<double>> big(es_bk.eigenvalues().data(),
                                        es_bk.eigenvalues().data() + BK.rows());
  std::vector<std::complex<double>> small(es_kb.eigenvalues().data(),
                                          es_kb.eigenvalues().data() + KB.rows());
  for (Eigen::Index i = KB.rows(); i < BK.rows(); ++i) small.emplace_back(0.0, 0.0);
  auto by_value = [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(big.begin(), big.end(), by_value);
  std::sort(small.begin(), small.end(), by_value);
  double gap = 0.0;
  for (size_t i = 0; i < big.size(); ++i) gap = std::max(gap, std::abs(big[i] - small[i]));
  report.spectrum_gap = gap;
  report.spectra_match = gap <= tol * (1.0 + BK.norm());

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es_bk.eigenvectors());
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  report.eigvec_cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  report.diagonalizable = report.eigvec_cond <= 1e8;
  return report;
}

SimResult simulate(const LqrProblem& p, const MatrixTraj& K, const Vec& x0) {
  if (x0.size() != p.n()) {
    throw std::invalid_argument("simulate: x0 length must equal n");
  }
  auto rhs = [&](double t, const Mat& x) -> Mat {
    return (p.A + p.B * K.eval(t)) * x;
  };
  MatrixTraj x(K.grid(), rk4_forward(K.grid(), Mat(x0), rhs));
  MatrixTraj u = MatrixTraj::zip(
      K, x, [](const Mat& k, const Mat& xs) -> Mat { return k * xs; });
  return SimResult{std::move(x), std::move(u), x0};
}

}  // namespace ioclqr
