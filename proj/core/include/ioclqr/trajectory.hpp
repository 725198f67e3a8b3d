#pragma once

#include <functional>
#include <vector>

#include "ioclqr/matops.hpp"

namespace ioclqr {

/// Uniform time grid on [t0, tf] with n_steps intervals (n_steps + 1 nodes).
struct TimeGrid {
  double t0 = 0.0;
  double tf = 1.0;
  int n_steps = 8;

  TimeGrid(double t0_, double tf_, int n_steps_);

  double h() const { return (tf - t0) / n_steps; }
  int n_nodes() const { return n_steps + 1; }
  double node(int i) const { return t0 + i * h(); }

  bool operator==(const TimeGrid& other) const;
};

/// A matrix-valued function of time stored as samples on a uniform grid.
///
/// Evaluation between nodes uses a local degree-5 polynomial fit (6 nearest
/// nodes); differentiation of order k uses local least-squares polynomial
/// fits of degree k+3 with windows that widen with the order, one-sided at
/// the boundaries; integration is composite Simpson. Immutable after
/// construction, so all operations are safe to call concurrently.
class MatrixTraj {
 public:
  MatrixTraj(TimeGrid grid, std::vector<Mat> samples);

  static MatrixTraj constant(TimeGrid grid, const Mat& value);
  static MatrixTraj from_function(TimeGrid grid,
                                  const std::function<Mat(double)>& fn);

  const TimeGrid& grid() const { return grid_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int n_nodes() const { return grid_.n_nodes(); }
  const Mat& sample(int i) const { return samples_.at(i); }
  const std::vector<Mat>& samples() const { return samples_; }

  /// Interpolated value at t in [t0, tf]; exact at grid nodes.
  /// Throws std::invalid_argument outside the interval.
  Mat eval(double t) const;

  /// Elementwise k-th time derivative on the same grid (k >= 1).
  /// Throws std::invalid_argument if the grid is too coarse for the
  /// requested order's stencil.
  MatrixTraj derivative(int order) const;

  /// Composite Simpson quadrature of the trajectory over [t0, tf]
  /// (final panel falls back to the trapezoid rule when n_steps is odd).
  Mat integrate() const;

  /// Nodewise transform (shape may change, but must be uniform).
  MatrixTraj map(const std::function<Mat(const Mat&)>& fn) const;

  /// Nodewise combination of two trajectories on the same grid.
  static MatrixTraj zip(const MatrixTraj& a, const MatrixTraj& b,
                        const std::function<Mat(const Mat&, const Mat&)>& fn);

 private:
  TimeGrid grid_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Mat> samples_;
};

}  // namespace ioclqr
