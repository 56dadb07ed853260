#pragma once

#include "mdl/numerics.hpp"

namespace mdl {

/// Full MDL scan over candidate orders d = 0..L-1.
struct MdlResult {
  RealVector criterion;   // Lambda(d)
  RealVector arith_mean;  // a_d, mean of the trailing L-d eigenvalues
  RealVector geom_mean;   // g_d, geometric mean of the trailing L-d eigenvalues
  int d_hat = 0;          // argmin, ties resolved to the smallest d
};

/// Arithmetic mean of eigenvalues d+1..L (0-based tail from index d).
/// Input must be sorted non-increasing with 0 <= d <= L-1.
double arithmetic_mean_tail(const RealVector& eigs, int d);

/// Geometric mean of the same tail, computed in the log domain. Throws
/// std::domain_error if any tail eigenvalue is <= 0.
double geometric_mean_tail(const RealVector& eigs, int d);

/// Lambda(d) = n (L-d) log(a_d / g_d) + d (2L-d) log(n) / 2, natural logs.
/// The data term is clamped at zero against AM-GM rounding. Requires n >= 2.
double mdl_criterion(const RealVector& eigs, int d, int n);

MdlResult estimate_d(const RealVector& eigs, int n);

}  // namespace mdl
