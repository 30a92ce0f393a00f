#pragma once

#include <vector>

#include "linemom/profile.hpp"

namespace linemom {

/// Raw moments of order 0..order_max of a profile; values[i] holds the
/// moment of (x - basis_shift)^i.
struct MomentVector {
  int order_max = 0;
  double basis_shift = 0.0;
  std::vector<double> values;  // length order_max + 1

  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

/// Lower-triangular matrix of binomially weighted kernel moments mapping
/// true-profile moments to measured-profile moments. Entries above the
/// diagonal are exact zeros; every diagonal entry equals the kernel mass.
/// basis_shift records the profile-axis origin of the moment vectors this
/// matrix pairs with (the kernel's difference coordinate is unaffected by
/// that origin choice, so kernel moments are always taken about 0).
struct ConversionMatrix {
  int order_max = 0;
  double basis_shift = 0.0;
  std::vector<double> entries;  // row-major (order_max+1)^2

  double at(int i, int j) const {
    return entries[static_cast<size_t>(i * (order_max + 1) + j)];
  }
  double& at(int i, int j) {
    return entries[static_cast<size_t>(i * (order_max + 1) + j)];
  }
};

/// Moment estimate from binned counts together with the event total.
struct CountMoments {
  MomentVector moments;  // values[0] == 1 exactly
  double total_counts = 0.0;
};

/// Exact integer binomial coefficient (n up to 62 without overflow).
long long binomial(int n, int k);

/// Trapezoidal raw moments of a density about `shift`.
MomentVector raw_moments(const SampledProfile& p, int order_max,
                         double shift = 0.0);

ConversionMatrix conversion_matrix(const SampledProfile& H, int order_max,
                                   double shift = 0.0);

/// Inverse by forward substitution; throws NumericalError naming the
/// offending diagonal when the matrix is singular.
ConversionMatrix invert_lower_triangular(const ConversionMatrix& C);

/// Applies C^{-1} to the measured moments: M_i = sum_j (C^{-1})_ij m_j.
MomentVector deconvolve_moments(const MomentVector& m,
                                const ConversionMatrix& C);

/// Lower-triangular matrix-vector product A*v (used for forward checks).
MomentVector apply_matrix(const ConversionMatrix& A, const MomentVector& v);

/// Count-based estimator: values[i] = (1/N) sum_k (x_k - shift)^i N(x_k).
CountMoments estimate_moments_from_counts(const SampledProfile& counts,
                                          int order_max, double shift = 0.0);

/// Divides by the zero-order moment; values[0] becomes exactly 1.
MomentVector normalized_moments(const MomentVector& M);

}  // namespace linemom
