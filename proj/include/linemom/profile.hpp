#pragma once

#include <vector>

namespace linemom {

/// Uniform 1-D grid: x_k = x_min + k*step for k = 0..n_points-1.
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_points = 2;

  Grid() = default;
  Grid(double x_min, double x_max, int n_points);

  double step() const { return (x_max - x_min) / (n_points - 1); }
  double x(int k) const { return x_min + k * step(); }
  int nearest_index(double x) const;
  bool contains(double x) const { return x >= x_min && x <= x_max; }
  /// Steps agree within a relative tolerance (default 1e-9).
  bool same_step(const Grid& other, double rel_tol = 1e-9) const;
  bool operator==(const Grid&) const = default;
};

enum class ProfileKind { density, counts };

/// A nonnegative real-valued function tabulated on a uniform grid.
/// kind=density means values are per unit x; kind=counts means events per bin
/// (count templates may carry fractional expected values).
class SampledProfile {
 public:
  SampledProfile(Grid grid, std::vector<double> values, ProfileKind kind);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  ProfileKind kind() const { return kind_; }
  double value(int k) const { return values_[static_cast<size_t>(k)]; }
  int size() const { return grid_.n_points; }

  SampledProfile with_values(std::vector<double> values) const {
    return SampledProfile(grid_, std::move(values), kind_);
  }
  SampledProfile as_kind(ProfileKind kind) const {
    return SampledProfile(grid_, values_, kind);
  }

 private:
  Grid grid_;
  std::vector<double> values_;
  ProfileKind kind_;
};

enum class Shape { gaussian, lorentzian, supergaussian, delta_bin };

/// Synthetic lineshape description. fwhm is ignored for delta_bin; order is
/// the supergaussian exponent parameter (order 1 reduces to gaussian).
struct ProfileSpec {
  Shape shape = Shape::gaussian;
  double center = 0.5;
  double fwhm = 0.1;
  int order = 1;
  double amplitude_mass = 1.0;
};

/// Tabulates the spec on the grid and rescales so that quadrature() equals
/// amplitude_mass exactly. Warns on stderr when more than 0.1% of the
/// analytic mass falls outside the grid.
SampledProfile generate(const ProfileSpec& spec, const Grid& grid);

/// Fraction of the shape's analytic mass lying outside the grid window.
double mass_outside_fraction(const ProfileSpec& spec, const Grid& grid);

/// Trapezoidal approximation of the integral of a density profile.
double quadrature(const SampledProfile& p);

/// Discrete convolution f(x_k) = h * sum_j H(x_k - x_j) F(x_j).
/// H lives on its own kernel grid (must contain 0, same step as F); it is
/// linearly interpolated between nodes and vanishes outside its grid.
SampledProfile convolve(const SampledProfile& F, const SampledProfile& H);

/// Raster-scan instrumental function H(x) = Sigma(x+eps) - Sigma(x-eps),
/// Sigma being the cumulative trapezoidal integral of S (linearly
/// interpolated, clamped outside the grid).
SampledProfile raster_kernel(const SampledProfile& S, double epsilon);

/// Scalar rescale so that quadrature(result) == target_mass.
SampledProfile normalize(const SampledProfile& p, double target_mass);

/// Kernel value at arbitrary x: linear interpolation on the profile grid,
/// zero outside. Near-node positions (within 1e-9 of a node, in index units)
/// snap to the tabulated value.
double interpolate(const SampledProfile& p, double x);

}  // namespace linemom
