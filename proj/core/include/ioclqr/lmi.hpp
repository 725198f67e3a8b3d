#pragma once

#include <vector>

#include "ioclqr/matops.hpp"

namespace ioclqr {

/// Affine family m0 + sum_i alpha_i * basis_i of symmetric matrices whose
/// intersection with the PSD cone (or the PD cone with a margin) is sought.
/// The basis matrices must be symmetric, share m0's shape, and be linearly
/// independent.
struct AffineLmi {
  Mat m0;
  std::vector<Mat> basis;
};

struct LmiOptions {
  double tol = 1e-9;      // accepted eigenvalue slack below zero
  int max_iter = 5000;
  double pd_margin = 0.0; // > 0: require lambda_min(member) >= pd_margin
};

struct LmiResult {
  bool feasible = false;
  Vec alpha;                          // coefficients of the verified member
  Mat member;                         // m0 + sum alpha_i basis_i
  int iterations = 0;
  double lambda_min = 0.0;            // of the returned member
  std::vector<double> residual_trace; // distance to the cone per iteration
};

/// Alternating projections between the affine span and the PSD cone.
/// On success the returned coefficients are verified by an eigenvalue check
/// before being reported feasible. Exceeding max_iter means "undecided":
/// it is not a certificate of infeasibility.
LmiResult lmi_feasible(const AffineLmi& prob, const LmiOptions& opts = {});

}  // namespace ioclqr
