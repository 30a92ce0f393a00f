#include "linemom/profile.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>

#include "linemom/errors.hpp"

namespace linemom {

namespace {

double trap_weight(const Grid& g, int k) {
  const double h = g.step();
  return (k == 0 || k == g.n_points - 1) ? 0.5 * h : h;
}

double gaussian_sigma(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

// Half-width parameter w of exp(-(|x-c|/w)^(2n)) with the requested FWHM.
double supergaussian_w(double fwhm, int order) {
  return fwhm / (2.0 * std::pow(std::numbers::ln2, 1.0 / (2.0 * order)));
}

double shape_value(const ProfileSpec& spec, double x) {
  switch (spec.shape) {
    case Shape::gaussian: {
      const double s = gaussian_sigma(spec.fwhm);
      const double d = (x - spec.center) / s;
      return std::exp(-0.5 * d * d);
    }
    case Shape::lorentzian: {
      const double g = 0.5 * spec.fwhm;
      const double d = (x - spec.center) / g;
      return 1.0 / (1.0 + d * d);
    }
    case Shape::supergaussian: {
      const double w = supergaussian_w(spec.fwhm, spec.order);
      const double d = std::abs(x - spec.center) / w;
      return std::exp(-std::pow(d, 2.0 * spec.order));
    }
    case Shape::delta_bin:
      return 0.0;  // handled separately
  }
  return 0.0;
}

// Integral of the unit-peak shape over the whole real line.
double analytic_total(const ProfileSpec& spec) {
  switch (spec.shape) {
    case Shape::gaussian:
      return gaussian_sigma(spec.fwhm) * std::sqrt(2.0 * std::numbers::pi);
    case Shape::lorentzian:
      return std::numbers::pi * 0.5 * spec.fwhm;
    case Shape::supergaussian: {
      const double w = supergaussian_w(spec.fwhm, spec.order);
      return 2.0 * w * std::tgamma(1.0 + 1.0 / (2.0 * spec.order));
    }
    case Shape::delta_bin:
      return 1.0;
  }
  return 1.0;
}

void validate_spec(const ProfileSpec& spec, const Grid& grid) {
  if (spec.shape == Shape::delta_bin) {
    if (!grid.contains(spec.center))
      throw InputError("delta_bin center " + std::to_string(spec.center) +
                       " lies outside the grid");
  } else if (!(spec.fwhm > 0.0)) {
    throw InputError("profile fwhm must be positive");
  }
  if (spec.shape == Shape::supergaussian && spec.order < 1)
    throw InputError("supergaussian order must be a positive integer");
  if (!(spec.amplitude_mass > 0.0))
    throw InputError("profile amplitude_mass must be positive");
}

}  // namespace

Grid::Grid(double x_min_, double x_max_, int n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)))
    throw InputError("grid bounds must be finite");
  if (!(x_max > x_min)) throw InputError("grid requires x_max > x_min");
  if (n_points < 2) throw InputError("grid requires n_points >= 2");
}

int Grid::nearest_index(double xq) const {
  const double t = (xq - x_min) / step();
  const int k = static_cast<int>(std::lround(t));
  return std::clamp(k, 0, n_points - 1);
}

bool Grid::same_step(const Grid& other, double rel_tol) const {
  const double a = step();
  const double b = other.step();
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

SampledProfile::SampledProfile(Grid grid, std::vector<double> values,
                               ProfileKind kind)
    : grid_(grid), values_(std::move(values)), kind_(kind) {
  if (static_cast<int>(values_.size()) != grid_.n_points)
    throw InputError("profile value count does not match the grid");
  for (size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]))
      throw InputError("profile value at index " + std::to_string(k) +
                       " is not finite");
    if (values_[k] < 0.0)
      throw InputError("profile value at index " + std::to_string(k) +
                       " is negative");
  }
}

double quadrature(const SampledProfile& p) {
  if (p.kind() != ProfileKind::density)
    throw InputError("quadrature expects a density profile");
  double acc = 0.0;
  for (int k = 0; k < p.size(); ++k) acc += trap_weight(p.grid(), k) * p.value(k);
  return acc;
}

double mass_outside_fraction(const ProfileSpec& spec, const Grid& grid) {
  if (spec.shape == Shape::delta_bin) return 0.0;
  double inside = 0.0;
  for (int k = 0; k < grid.n_points; ++k)
    inside += trap_weight(grid, k) * shape_value(spec, grid.x(k));
  const double total = analytic_total(spec);
  return std::max(0.0, 1.0 - inside / total);
}

SampledProfile generate(const ProfileSpec& spec, const Grid& grid) {
  validate_spec(spec, grid);
  std::vector<double> v(static_cast<size_t>(grid.n_points), 0.0);
  if (spec.shape == Shape::delta_bin) {
    const int k = grid.nearest_index(spec.center);
    v[static_cast<size_t>(k)] = spec.amplitude_mass / trap_weight(grid, k);
  } else {
    const double outside = mass_outside_fraction(spec, grid);
    if (outside > 1e-3)
      std::cerr << "linemom: warning: " << outside * 100.0
                << "% of the profile mass falls outside the grid\n";
    for (int k = 0; k < grid.n_points; ++k)
      v[static_cast<size_t>(k)] = shape_value(spec, grid.x(k));
  }
  SampledProfile p(grid, std::move(v), ProfileKind::density);
  return normalize(p, spec.amplitude_mass);
}

double interpolate(const SampledProfile& p, double x) {
  const Grid& g = p.grid();
  const double t = (x - g.x_min) / g.step();
  if (t < 0.0 || t > g.n_points - 1) return 0.0;
  const double r = std::round(t);
  if (std::abs(t - r) < 1e-9) return p.value(static_cast<int>(r));
  const int i = static_cast<int>(std::floor(t));
  const double frac = t - i;
  return (1.0 - frac) * p.value(i) + frac * p.value(i + 1);
}

SampledProfile convolve(const SampledProfile& F, const SampledProfile& H) {
  if (F.kind() != ProfileKind::density || H.kind() != ProfileKind::density)
    throw InputError("convolve expects density profiles");
  const Grid& gf = F.grid();
  const Grid& gh = H.grid();
  if (!gf.same_step(gh))
    throw InputError("convolve requires identical grid steps");
  if (gh.x_min > 0.0 || gh.x_max < 0.0)
    throw InputError("kernel grid must contain 0");

  const double h = gf.step();
  std::vector<double> out(static_cast<size_t>(gf.n_points), 0.0);
  for (int k = 0; k < gf.n_points; ++k) {
    // x_k - x_j must fall inside the kernel grid; restrict j accordingly.
    const int j_lo = std::max(0, k - static_cast<int>(std::floor(gh.x_max / h + 1e-9)));
    const int j_hi = std::min(gf.n_points - 1,
                              k - static_cast<int>(std::ceil(gh.x_min / h - 1e-9)));
    double acc = 0.0;
    for (int j = j_lo; j <= j_hi; ++j)
      acc += interpolate(H, (k - j) * h) * F.value(j);
    out[static_cast<size_t>(k)] = h * acc;
  }
  return SampledProfile(gf, std::move(out), ProfileKind::density);
}

SampledProfile raster_kernel(const SampledProfile& S, double epsilon) {
  if (S.kind() != ProfileKind::density)
    throw InputError("raster_kernel expects a density profile");
  if (!(epsilon > 0.0)) throw InputError("raster_kernel epsilon must be positive");
  const Grid& g = S.grid();
  if (epsilon > 0.5 * (g.x_max - g.x_min))
    throw InputError("raster_kernel epsilon exceeds half the kernel grid extent");

  const double h = g.step();
  std::vector<double> sigma(static_cast<size_t>(g.n_points), 0.0);
  for (int k = 1; k < g.n_points; ++k)
    sigma[static_cast<size_t>(k)] = sigma[static_cast<size_t>(k - 1)] +
                                    0.5 * h * (S.value(k - 1) + S.value(k));
  const double total = sigma.back();

  auto sigma_at = [&](double x) {
    const double t = (x - g.x_min) / h;
    if (t <= 0.0) return 0.0;
    if (t >= g.n_points - 1) return total;
    const int i = static_cast<int>(std::floor(t));
    const double frac = t - i;
    return (1.0 - frac) * sigma[static_cast<size_t>(i)] +
           frac * sigma[static_cast<size_t>(i + 1)];
  };

  std::vector<double> out(static_cast<size_t>(g.n_points));
  for (int k = 0; k < g.n_points; ++k) {
    const double xk = g.x(k);
    out[static_cast<size_t>(k)] =
        std::max(0.0, sigma_at(xk + epsilon) - sigma_at(xk - epsilon));
  }
  return SampledProfile(g, std::move(out), ProfileKind::density);
}

SampledProfile normalize(const SampledProfile& p, double target_mass) {
  if (!(target_mass > 0.0)) throw InputError("normalize target mass must be positive");
  const double q = quadrature(p);
  if (!(q > 0.0)) throw InputError("normalize requires a profile with positive mass");
  const double scale = target_mass / q;
  std::vector<double> v(p.values());
  for (double& x : v) x *= scale;
  return SampledProfile(p.grid(), std::move(v), p.kind());
}

}  // namespace linemom
