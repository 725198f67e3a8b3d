#pragma once

#include <Eigen/Dense>

namespace ioclqr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Relative singular-value cutoff used for all rank decisions unless the
// caller overrides it: singular values below tol * sigma_max count as zero.
inline constexpr double kRankTol = 1e-8;

// Relative asymmetry tolerated before a "symmetric" input is rejected.
inline constexpr double kSymTol = 1e-8;

/// Column-stacking vectorization: vec(M) has length rows*cols.
Vec vec(const Mat& m);

/// Inverse of vec: reshape a vector back into a rows x cols matrix.
Mat mat(const Vec& v, Eigen::Index rows, Eigen::Index cols);

/// Half-vectorization of a square matrix: stacks the columns of the lower
/// triangle (diagonal included), length n(n+1)/2. The input is not required
/// to be symmetric; only entries on or below the diagonal are read.
Vec halfvec(const Mat& s);

/// Rebuild a symmetric n x n matrix from its half-vectorization.
/// Equivalent to mat(duplication_matrix(n) * v, n, n).
Mat sym_from_halfvec(const Vec& v, Eigen::Index n);

/// Duplication matrix D_n (n^2 x n(n+1)/2): D_n * halfvec(S) = vec(S) for
/// every symmetric S. Full column rank. Throws std::invalid_argument for n < 1.
Mat duplication_matrix(Eigen::Index n);

/// Dense Kronecker product a (x) b.
Mat kron(const Mat& a, const Mat& b);

/// Moore-Penrose pseudoinverse via full SVD. Singular values below
/// tol * sigma_max are treated as zero. The zero matrix maps to the zero
/// matrix (of transposed shape).
Mat pinv(const Mat& m, double tol = kRankTol);

/// Pseudoinverse truncated to a prescribed rank (keeps the `rank` largest
/// singular values regardless of their magnitude).
Mat pinv_with_rank(const Mat& m, Eigen::Index rank);

/// Numerical rank at the relative cutoff tol.
Eigen::Index rank_of(const Mat& m, double tol = kRankTol);

/// Orthonormal bases for the null space and the range of a matrix.
struct BasisPair {
  Mat null_basis;   // cols x k, orthonormal columns spanning null(M)
  Mat range_basis;  // rows x r, orthonormal columns spanning range(M)
};

/// Bases from the full SVD of m; dim(null) + rank = cols. For symmetric m
/// the two bases are mutually orthogonal.
BasisPair null_range_bases(const Mat& m, double tol = kRankTol);

/// Smallest eigenvalue of the symmetrized input.
double lambda_min_sym(const Mat& m);

/// (M + M^T)/2.
Mat symmetrize(const Mat& m);

/// Symmetrize if the relative asymmetry is below tol, otherwise throw
/// InconsistencyError. Non-square input throws std::invalid_argument.
Mat require_symmetric(const Mat& m, double tol = kSymTol);

/// Positive semi-definiteness test: lambda_min >= -tol * (1 + ||M||).
/// The input must be square and symmetric to kSymTol (it is symmetrized
/// before testing). Non-square input throws.
bool is_psd(const Mat& m, double tol = kRankTol);

/// Positive definiteness test: lambda_min >= tol_pd (some strictly positive
/// margin is required).
bool is_pd(const Mat& m, double tol_pd = kRankTol);

}  // namespace ioclqr
