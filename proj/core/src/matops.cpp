#include "ioclqr/matops.hpp"

#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"

namespace ioclqr {

Vec vec(const Mat& m) {
  // Eigen stores column-major, so the raw layout already is the
  // column-stacked vector.
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat mat(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != v.size()) {
    throw std::invalid_argument("mat: vector length does not match rows*cols");
  }
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Vec halfvec(const Mat& s) {
  if (s.rows() != s.cols()) {
    throw std::invalid_argument("halfvec: input must be square");
  }
  const Eigen::Index n = s.rows();
  Vec out(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      out(k++) = s(i, j);
    }
  }
  return out;
}

Mat sym_from_halfvec(const Vec& v, Eigen::Index n) {
  if (v.size() != n * (n + 1) / 2) {
    throw std::invalid_argument("sym_from_halfvec: length must be n(n+1)/2");
  }
  Mat s(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      s(i, j) = v(k);
      s(j, i) = v(k);
      ++k;
    }
  }
  return s;
}

Mat duplication_matrix(Eigen::Index n) {
  if (n < 1) {
    throw std::invalid_argument("duplication_matrix: n must be >= 1");
  }
  Mat d = Mat::Zero(n * n, n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      d(i + j * n, k) = 1.0;
      d(j + i * n, k) = 1.0;  // same entry when i == j
      ++k;
    }
  }
  return d;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

Eigen::JacobiSVD<Mat> full_svd(const Mat& m) {
  return Eigen::JacobiSVD<Mat>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

Mat pinv(const Mat& m, double tol) {
  if (m.size() == 0) return Mat(m.cols(), m.rows());
  const auto svd = full_svd(m);
  const Vec& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
  Vec inv_sv = Vec::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  }
  return svd.matrixV().leftCols(sv.size()) * inv_sv.asDiagonal() *
         svd.matrixU().leftCols(sv.size()).transpose();
}

Mat pinv_with_rank(const Mat& m, Eigen::Index rank) {
  if (m.size() == 0) return Mat(m.cols(), m.rows());
  const auto svd = full_svd(m);
  const Vec& sv = svd.singularValues();
  Vec inv_sv = Vec::Zero(sv.size());
  for (Eigen::Index i = 0; i < std::min(rank, sv.size()); ++i) {
    if (sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  }
  return svd.matrixV().leftCols(sv.size()) * inv_sv.asDiagonal() *
         svd.matrixU().leftCols(sv.size()).transpose();
}

Eigen::Index rank_of(const Mat& m, double tol) {
  if (m.size() == 0) return 0;
  const auto svd = Eigen::JacobiSVD<Mat>(m);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++r;
  }
  return r;
}

BasisPair null_range_bases(const Mat& m, double tol) {
  const auto svd = full_svd(m);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = tol * smax;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++r;
  }
  BasisPair out;
  out.range_basis = svd.matrixU().leftCols(r);
  out.null_basis = svd.matrixV().rightCols(m.cols() - r);
  return out;
}

double lambda_min_sym(const Mat& m) {
  const Mat s = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat require_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("require_symmetric: input must be square");
  }
  const double scale = 1.0 + m.norm();
  const double asym = (m - m.transpose()).norm();
  if (asym > tol * scale) {
    throw InconsistencyError("require_symmetric: asymmetry " + std::to_string(asym) +
                             " exceeds tolerance");
  }
  return symmetrize(m);
}

bool is_psd(const Mat& m, double tol) {
  const Mat s = require_symmetric(m, kSymTol);
  return lambda_min_sym(s) >= -tol * (1.0 + s.norm());
}

bool is_pd(const Mat& m, double tol_pd) {
  const Mat s = require_symmetric(m, kSymTol);
  return lambda_min_sym(s) >= tol_pd;
}

}  // namespace ioclqr
