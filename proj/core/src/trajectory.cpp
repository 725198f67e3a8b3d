#include "ioclqr/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ioclqr/errors.hpp"

namespace ioclqr {

TimeGrid::TimeGrid(double t0_, double tf_, int n_steps_)
    : t0(t0_), tf(tf_), n_steps(n_steps_) {
  if (!(tf > t0)) throw std::invalid_argument("TimeGrid: tf must exceed t0");
  if (n_steps < 8) throw std::invalid_argument("TimeGrid: n_steps must be >= 8");
  if (!std::isfinite(t0) || !std::isfinite(tf)) {
    throw std::invalid_argument("TimeGrid: endpoints must be finite");
  }
}

bool TimeGrid::operator==(const TimeGrid& other) const {
  return t0 == other.t0 && tf == other.tf && n_steps == other.n_steps;
}

MatrixTraj::MatrixTraj(TimeGrid grid, std::vector<Mat> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.n_nodes()) {
    throw std::invalid_argument("MatrixTraj: sample count must be n_steps + 1");
  }
  rows_ = samples_.front().rows();
  cols_ = samples_.front().cols();
  for (const Mat& s : samples_) {
    if (s.rows() != rows_ || s.cols() != cols_) {
      throw std::invalid_argument("MatrixTraj: samples must share one shape");
    }
    if (!s.allFinite()) {
      throw std::invalid_argument("MatrixTraj: samples must be finite");
    }
  }
}

MatrixTraj MatrixTraj::constant(TimeGrid grid, const Mat& value) {
  return MatrixTraj(grid, std::vector<Mat>(grid.n_nodes(), value));
}

MatrixTraj MatrixTraj::from_function(TimeGrid grid,
                                     const std::function<Mat(double)>& fn) {
  std::vector<Mat> samples;
  samples.reserve(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) samples.push_back(fn(grid.node(i)));
  return MatrixTraj(grid, std::move(samples));
}

namespace {

// Least-squares polynomial-fit weights for the k-th derivative at local
// node offset c within a window of w nodes, computed on the unit grid
// (offsets 0..w-1). The caller rescales by h^-k.
Vec stencil_weights(int w, int degree, int k, int c) {
  Mat v(w, degree + 1);
  for (int j = 0; j < w; ++j) {
    double p = 1.0;
    const double x = static_cast<double>(j - c);
    for (int q = 0; q <= degree; ++q) {
      v(j, q) = p;
      p *= x;
    }
  }
  // Row k of pinv(V) gives the coefficient of x^k in the LS fit; the k-th
  // derivative at x=0 is k! times that coefficient.
  Mat vpinv = pinv(v, 1e-13);
  double kfact = 1.0;
  for (int q = 2; q <= k; ++q) kfact *= q;
  return kfact * vpinv.row(k).transpose();
}

// Window width for derivative order k: wide enough to average roundoff
// noise in repeated differentiation, narrow enough to keep the fit local.
int derivative_window(int k, int degree) {
  return std::max(degree + 1, 6 * k + 9);
}

}  // namespace

Mat MatrixTraj::eval(double t) const {
  const double h = grid_.h();
  const double tol = 1e-9 * (std::abs(grid_.t0) + std::abs(grid_.tf) + 1.0);
  if (t < grid_.t0 - tol || t > grid_.tf + tol) {
    throw std::invalid_argument("MatrixTraj::eval: t outside [t0, tf]");
  }
  t = std::clamp(t, grid_.t0, grid_.tf);

  const int n_nodes = grid_.n_nodes();
  const double pos = (t - grid_.t0) / h;
  const int nearest = static_cast<int>(std::lround(pos));
  if (nearest >= 0 && nearest < n_nodes &&
      std::abs(pos - nearest) < 1e-12 * (std::abs(pos) + 1.0)) {
    return samples_[nearest];
  }

  constexpr int w = 6;  // degree-5 local interpolation
  int s = static_cast<int>(std::floor(pos)) - (w / 2 - 1);
  s = std::clamp(s, 0, n_nodes - w);

  // Barycentric Lagrange on the w local nodes (uniform spacing).
  double bary[w];
  double sign = 1.0;
  double binom = 1.0;
  for (int j = 0; j < w; ++j) {
    bary[j] = sign * binom;
    sign = -sign;
    binom = binom * (w - 1 - j) / (j + 1);
  }
  const double x = pos - s;
  double denom = 0.0;
  Mat num = Mat::Zero(rows_, cols_);
  for (int j = 0; j < w; ++j) {
    const double wj = bary[j] / (x - j);
    num += wj * samples_[s + j];
    denom += wj;
  }
  return num / denom;
}

MatrixTraj MatrixTraj::derivative(int order) const {
  if (order < 1) throw std::invalid_argument("derivative: order must be >= 1");
  const int degree = order + 3;
  const int w = derivative_window(order, degree);
  const int n_nodes = grid_.n_nodes();
  if (w > n_nodes) {
    throw std::invalid_argument("derivative: grid too coarse for requested order");
  }

  const double hk = std::pow(grid_.h(), order);
  std::vector<Vec> weights(w);  // indexed by the local offset c = i - s

  std::vector<Mat> out(n_nodes, Mat::Zero(rows_, cols_));
  for (int i = 0; i < n_nodes; ++i) {
    int s = std::clamp(i - w / 2, 0, n_nodes - w);
    const int c = i - s;
    if (weights[c].size() == 0) weights[c] = stencil_weights(w, degree, order, c);
    const Vec& wt = weights[c];
    Mat acc = Mat::Zero(rows_, cols_);
    for (int j = 0; j < w; ++j) {
      if (wt(j) != 0.0) acc += wt(j) * samples_[s + j];
    }
    out[i] = acc / hk;
  }
  return MatrixTraj(grid_, std::move(out));
}

Mat MatrixTraj::integrate() const {
  const double h = grid_.h();
  const int n = grid_.n_steps;
  const int n_simpson = (n % 2 == 0) ? n : n - 1;

  Mat acc = Mat::Zero(rows_, cols_);
  if (n_simpson > 0) {
    acc += samples_[0] + samples_[n_simpson];
    for (int i = 1; i < n_simpson; ++i) {
      acc += (i % 2 == 1 ? 4.0 : 2.0) * samples_[i];
    }
    acc *= h / 3.0;
  }
  if (n_simpson < n) {
    acc += 0.5 * h * (samples_[n - 1] + samples_[n]);
  }
  return acc;
}

MatrixTraj MatrixTraj::map(const std::function<Mat(const Mat&)>& fn) const {
  std::vector<Mat> out;
  out.reserve(samples_.size());
  for (const Mat& s : samples_) out.push_back(fn(s));
  return MatrixTraj(grid_, std::move(out));
}

MatrixTraj MatrixTraj::zip(const MatrixTraj& a, const MatrixTraj& b,
                           const std::function<Mat(const Mat&, const Mat&)>& fn) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("MatrixTraj::zip: grids must match");
  }
  std::vector<Mat> out;
  out.reserve(a.samples().size());
  for (size_t i = 0; i < a.samples().size(); ++i) {
    out.push_back(fn(a.samples()[i], b.samples()[i]));
  }
  return MatrixTraj(a.grid(), std::move(out));
}

}  // namespace ioclqr
