#include "linemom/moments.hpp"

#include <cmath>
#include <string>

#include "linemom/errors.hpp"

namespace linemom {

namespace {

double trap_weight(const Grid& g, int k) {
  const double h = g.step();
  return (k == 0 || k == g.n_points - 1) ? 0.5 * h : h;
}

}  // namespace

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

MomentVector raw_moments(const SampledProfile& p, int order_max, double shift) {
  if (order_max < 0) throw InputError("moment order must be nonnegative");
  if (p.kind() != ProfileKind::density)
    throw InputError("raw_moments expects a density profile");
  MomentVector m{order_max, shift,
                 std::vector<double>(static_cast<size_t>(order_max + 1), 0.0)};
  for (int k = 0; k < p.size(); ++k) {
    const double w = trap_weight(p.grid(), k) * p.value(k);
    const double d = p.grid().x(k) - shift;
    double pw = 1.0;
    for (int i = 0; i <= order_max; ++i) {
      m.values[static_cast<size_t>(i)] += w * pw;
      pw *= d;
    }
  }
  return m;
}

ConversionMatrix conversion_matrix(const SampledProfile& H, int order_max,
                                   double shift) {
  if (order_max < 0) throw InputError("moment order must be nonnegative");
  // Kernel moments are taken about 0 in the kernel's difference coordinate:
  // a common origin shift on the profile axis cancels in x - y, so the same
  // matrix serves every basis_shift it is recorded against.
  const MomentVector mu = raw_moments(H, order_max, 0.0);
  ConversionMatrix C{order_max, shift,
                     std::vector<double>(
                         static_cast<size_t>((order_max + 1) * (order_max + 1)),
                         0.0)};
  for (int i = 0; i <= order_max; ++i)
    for (int j = 0; j <= i; ++j)
      C.at(i, j) = static_cast<double>(binomial(i, j)) * mu[i - j];
  return C;
}

ConversionMatrix invert_lower_triangular(const ConversionMatrix& C) {
  const int n = C.order_max + 1;
  double largest = 0.0;
  for (double e : C.entries) largest = std::max(largest, std::abs(e));
  for (int i = 0; i < n; ++i) {
    if (std::abs(C.at(i, i)) <= 1e-12 * largest)
      throw NumericalError("conversion matrix is singular: diagonal entry " +
                           std::to_string(i) + " is " +
                           std::to_string(C.at(i, i)));
  }

  ConversionMatrix X{C.order_max, C.basis_shift,
                     std::vector<double>(static_cast<size_t>(n * n), 0.0)};
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      double rhs = (i == j) ? 1.0 : 0.0;
      for (int k = j; k < i; ++k) rhs -= C.at(i, k) * X.at(k, j);
      X.at(i, j) = rhs / C.at(i, i);
    }
  }
  return X;
}

MomentVector apply_matrix(const ConversionMatrix& A, const MomentVector& v) {
  if (A.order_max != v.order_max)
    throw InputError("matrix and moment order mismatch");
  MomentVector out{v.order_max, v.basis_shift,
                   std::vector<double>(v.values.size(), 0.0)};
  for (int i = 0; i <= v.order_max; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += A.at(i, j) * v[j];
    out.values[static_cast<size_t>(i)] = acc;
  }
  return out;
}

MomentVector deconvolve_moments(const MomentVector& m,
                                const ConversionMatrix& C) {
  if (C.order_max != m.order_max)
    throw InputError("conversion matrix and moment order mismatch");
  if (C.basis_shift != m.basis_shift)
    throw InputError("conversion matrix and moment basis_shift mismatch");
  return apply_matrix(invert_lower_triangular(C), m);
}

CountMoments estimate_moments_from_counts(const SampledProfile& counts,
                                          int order_max, double shift) {
  if (order_max < 0) throw InputError("moment order must be nonnegative");
  if (counts.kind() != ProfileKind::counts)
    throw InputError("estimate_moments_from_counts expects a counts profile");
  double total = 0.0;
  for (int k = 0; k < counts.size(); ++k) total += counts.value(k);
  if (!(total > 0.0)) throw InputError("count profile is all zeros");

  MomentVector m{order_max, shift,
                 std::vector<double>(static_cast<size_t>(order_max + 1), 0.0)};
  for (int k = 0; k < counts.size(); ++k) {
    const double c = counts.value(k);
    if (c == 0.0) continue;
    const double d = counts.grid().x(k) - shift;
    double pw = 1.0;
    for (int i = 0; i <= order_max; ++i) {
      m.values[static_cast<size_t>(i)] += c * pw;
      pw *= d;
    }
  }
  for (double& v : m.values) v /= total;
  m.values[0] = 1.0;
  return CountMoments{std::move(m), total};
}

MomentVector normalized_moments(const MomentVector& M) {
  const double m0 = M[0];
  if (std::abs(m0) <= 1e-12)
    throw InputError("cannot normalize moments: vanishing zero-order moment");
  MomentVector out{M.order_max, M.basis_shift, M.values};
  for (double& v : out.values) v /= m0;
  out.values[0] = 1.0;
  return out;
}

}  // namespace linemom
