#include "ioclqr/lmi.hpp"

#include <stdexcept>

namespace ioclqr {

namespace {

Mat psd_project(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(x));
  Vec d = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

LmiResult lmi_feasible(const AffineLmi& prob, const LmiOptions& opts) {
  const Eigen::Index n = prob.m0.rows();
  if (prob.m0.cols() != n) {
    throw std::invalid_argument("lmi_feasible: m0 must be square");
  }
  for (const Mat& b : prob.basis) {
    if (b.rows() != n || b.cols() != n) {
      throw std::invalid_argument("lmi_feasible: basis shapes must match m0");
    }
  }
  const int r = static_cast<int>(prob.basis.size());

  // Feasibility of m0 + sum alpha_i B_i >= pd_margin*I is PSD feasibility of
  // the shifted family.
  const Mat m0s = symmetrize(prob.m0) - opts.pd_margin * Mat::Identity(n, n);

  LmiResult result;
  result.alpha = Vec::Zero(r);

  if (r == 0) {
    result.lambda_min = lambda_min_sym(prob.m0);
    result.member = symmetrize(prob.m0);
    result.feasible = lambda_min_sym(m0s) >= -opts.tol;
    return result;
  }

  // Gram matrix of the basis; independence makes it PD.
  Mat gram(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      gram(i, j) = (prob.basis[i].array() * prob.basis[j].array()).sum();
      gram(j, i) = gram(i, j);
    }
  }
  Eigen::LDLT<Mat> gram_ldlt(gram);
  if (gram_ldlt.info() != Eigen::Success) {
    throw std::invalid_argument("lmi_feasible: basis matrices are dependent");
  }

  Vec alpha = Vec::Zero(r);
  Mat x = m0s;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    result.iterations = iter;
    const Mat y = psd_project(x);
    result.residual_trace.push_back((x - y).norm());

    // Project the cone point back onto the affine span.
    Vec b(r);
    for (int i = 0; i < r; ++i) {
      b(i) = (prob.basis[i].array() * (y - m0s).array()).sum();
    }
    alpha = gram_ldlt.solve(b);
    x = m0s;
    for (int i = 0; i < r; ++i) x += alpha(i) * prob.basis[i];

    if (lambda_min_sym(x) >= -opts.tol) {
      result.feasible = true;
      break;
    }
  }

  result.alpha = alpha;
  result.member = symmetrize(prob.m0);
  for (int i = 0; i < r; ++i) result.member += alpha(i) * prob.basis[i];
  result.lambda_min = lambda_min_sym(result.member);
  // Post-hoc verification: never report an unverified coefficient vector.
  result.feasible =
      result.feasible && result.lambda_min >= opts.pd_margin - opts.tol;
  return result;
}

}  // namespace ioclqr
