#include "ioclqr/duality.hpp"

#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"

namespace ioclqr {

AuxProblem build_aux(const MatrixTraj& K, const MatrixTraj& P, const Mat& R,
                     const Mat& B, double tol) {
  if (!(K.grid() == P.grid())) {
    throw std::invalid_argument("build_aux: K and P must share one grid");
  }
  const Eigen::Index m = K.rows();
  const Eigen::Index n = K.cols();
  if (B.rows() != n || B.cols() != m || P.rows() != n || P.cols() != n) {
    throw std::invalid_argument("build_aux: inconsistent shapes");
  }
  if (rank_of(B, tol) != m) {
    throw std::invalid_argument("build_aux: B must have full column rank");
  }

  std::vector<Mat> q_bar;
  q_bar.reserve(K.n_nodes());
  for (int i = 0; i < K.n_nodes(); ++i) {
    const Mat& Kt = K.sample(i);
    const Mat& Pt = P.sample(i);
    if (rank_of(Kt, tol) != m || rank_of(Kt * B, tol) != m) {
      throw std::invalid_argument(
          "build_aux: K(t) must have full row rank at every node");
    }
    if (lambda_min_sym(Pt) <= 0.0) {
      throw std::invalid_argument("build_aux: P(t) must be PD at every node");
    }
    Mat qb = symmetrize(B.transpose() * Pt * B);
    if (lambda_min_sym(qb) <= 0.0) {
      throw std::invalid_argument("build_aux: B'P(t)B must be PD at every node");
    }
    q_bar.push_back(std::move(qb));
  }

  AuxProblem aux{K, symmetrize(R), MatrixTraj(K.grid(), std::move(q_bar)), P, m, n};
  return aux;
}

DualityReport verify_duality(const AuxProblem& aux, const Mat& B, const Mat& R,
                             double tol) {
  const TimeGrid& grid = aux.K.grid();
  const int n_nodes = grid.n_nodes();
  const double h = grid.h();

  bool cond_warning = false;
  auto rhs = [&](double t, const Mat& pbar) -> Mat {
    const Mat Kt = aux.K.eval(t);
    const Mat Pt = symmetrize(aux.R_bar.eval(t));
    Eigen::SelfAdjointEigenSolver<Mat> es(Pt);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > 1e10) cond_warning = true;
    const Mat p_inv_kt = Pt.llt().solve(Kt.transpose());  // P^-1 K'
    return pbar * Kt * p_inv_kt * pbar - aux.Q_bar.eval(t);
  };

  std::vector<Mat> p_bar(n_nodes);
  p_bar[n_nodes - 1] = aux.F_bar;
  Mat x = aux.F_bar;
  for (int i = n_nodes - 1; i > 0; --i) {
    const double t = grid.node(i);
    const double hs = -h;
    const Mat k1 = rhs(t, x);
    const Mat k2 = rhs(t + 0.5 * hs, x + 0.5 * hs * k1);
    const Mat k3 = rhs(t + 0.5 * hs, x + 0.5 * hs * k2);
    const Mat k4 = rhs(t + hs, x + hs * k3);
    x = symmetrize(x + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!x.allFinite() || x.norm() > 1e12) {
      throw IntegrationError("verify_duality: auxiliary integration diverged");
    }
    p_bar[i - 1] = x;
  }

  DualityReport report{MatrixTraj(grid, std::move(p_bar)), 0.0, 0.0, -1, -1,
                       false, false, cond_warning};
  for (int i = 0; i < n_nodes; ++i) {
    const double p_dev = (report.P_bar.sample(i) - R).norm();
    if (p_dev > report.max_p_dev) {
      report.max_p_dev = p_dev;
      report.worst_p_node = i;
    }
    const Mat& Kt = aux.K.sample(i);
    const Mat fb = -symmetrize(aux.R_bar.sample(i)).llt().solve(
        Kt.transpose() * report.P_bar.sample(i));
    const double fb_dev = (fb - B).norm();
    if (fb_dev > report.max_fb_dev) {
      report.max_fb_dev = fb_dev;
      report.worst_fb_node = i;
    }
  }
  report.p_bar_constant = report.max_p_dev <= tol;
  report.feedback_matches = report.max_fb_dev <= tol;
  return report;
}

}  // namespace ioclqr
