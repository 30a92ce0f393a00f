#include "linemom/kramers_kronig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "linemom/errors.hpp"

namespace linemom {

namespace {

double trap_weight(const Grid& g, int k) {
  const double h = g.step();
  return (k == 0 || k == g.n_points - 1) ? 0.5 * h : h;
}

void require_positive(const SampledProfile& p, const char* what) {
  for (int k = 0; k < p.size(); ++k)
    if (!(p.value(k) > 0.0))
      throw InputError(std::string(what) + " must be strictly positive (bin " +
                       std::to_string(k) + ")");
}

void require_unit_mass(const SampledProfile& H) {
  const double q = quadrature(H);
  if (std::abs(q - 1.0) > 1e-6)
    throw InputError("kernel must have unit mass, got " + std::to_string(q));
}

// PV transform of tabulated samples u: -(1/2pi) sum_{j!=i} w_j u_j / ((j-i)h).
std::vector<double> pv_transform(const Grid& g, const std::vector<double>& u) {
  const int n = g.n_points;
  const double h = g.step();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  std::vector<double> wu(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    wu[static_cast<size_t>(j)] = trap_weight(g, j) * u[static_cast<size_t>(j)];
  const double pref = -1.0 / (2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += wu[static_cast<size_t>(j)] / (static_cast<double>(j - i) * h);
    }
    out[static_cast<size_t>(i)] = pref * acc;
  }
  return out;
}

std::vector<double> log_blur_ratio(const SampledProfile& f_eta,
                                   const SampledProfile& H) {
  require_positive(f_eta, "F_eta");
  require_unit_mass(H);
  const SampledProfile blurred = kk_blur(f_eta, H);
  std::vector<double> u(static_cast<size_t>(f_eta.size()));
  for (int k = 0; k < f_eta.size(); ++k) {
    if (!(blurred.value(k) > 0.0))
      throw NumericalError("blurred spectrum vanishes at bin " +
                           std::to_string(k));
    u[static_cast<size_t>(k)] = std::log(blurred.value(k) / f_eta.value(k));
  }
  return u;
}

}  // namespace

TransmissionPair::TransmissionPair(SampledProfile f_eta, SampledProfile f_ref)
    : f_eta_(std::move(f_eta)), f_ref_(std::move(f_ref)) {
  if (!(f_eta_.grid() == f_ref_.grid()))
    throw InputError("transmission pair requires identical grids");
  require_positive(f_ref_, "reference intensity");
  require_positive(f_eta_, "measured intensity");
}

SampledProfile TransmissionPair::eta() const {
  std::vector<double> v(static_cast<size_t>(f_eta_.size()));
  for (int k = 0; k < f_eta_.size(); ++k)
    v[static_cast<size_t>(k)] = f_eta_.value(k) / f_ref_.value(k);
  return SampledProfile(f_eta_.grid(), std::move(v), ProfileKind::density);
}

PhaseProfile kk_phase(const SampledProfile& eta) {
  require_positive(eta, "transmission");
  std::vector<double> u(static_cast<size_t>(eta.size()));
  for (int k = 0; k < eta.size(); ++k)
    u[static_cast<size_t>(k)] = std::log(eta.value(k));
  return PhaseProfile{eta.grid(), pv_transform(eta.grid(), u)};
}

SampledProfile kk_blur(const SampledProfile& F, const SampledProfile& H) {
  const SampledProfile plain = convolve(F, H);
  // Local kernel mass: convolution of a constant 1 with H. Dividing by it
  // keeps constants invariant where the kernel window is clipped by the
  // grid boundary.
  const SampledProfile ones(
      F.grid(), std::vector<double>(static_cast<size_t>(F.size()), 1.0),
      ProfileKind::density);
  const SampledProfile local_mass = convolve(ones, H);
  std::vector<double> v(static_cast<size_t>(F.size()));
  for (int k = 0; k < F.size(); ++k) {
    if (!(local_mass.value(k) > 0.0))
      throw NumericalError("kernel mass vanishes inside the grid at bin " +
                           std::to_string(k));
    v[static_cast<size_t>(k)] = plain.value(k) / local_mass.value(k);
  }
  return SampledProfile(F.grid(), std::move(v), ProfileKind::density);
}

SampledProfile blurred_transmission(const TransmissionPair& pair,
                                    const SampledProfile& H) {
  require_unit_mass(H);
  const SampledProfile num = kk_blur(pair.f_eta(), H);
  const SampledProfile den = kk_blur(pair.f_ref(), H);
  std::vector<double> v(static_cast<size_t>(num.size()));
  for (int k = 0; k < num.size(); ++k) {
    if (!(den.value(k) > 0.0))
      throw NumericalError("blurred reference vanishes at bin " +
                           std::to_string(k));
    v[static_cast<size_t>(k)] = num.value(k) / den.value(k);
  }
  return SampledProfile(num.grid(), std::move(v), ProfileKind::density);
}

PhaseProfile phase_discrepancy(const SampledProfile& f_eta,
                               const SampledProfile& H) {
  const std::vector<double> u = log_blur_ratio(f_eta, H);
  return PhaseProfile{f_eta.grid(), pv_transform(f_eta.grid(), u)};
}

KkError kk_quadratic_error(const SampledProfile& f_eta,
                           const SampledProfile& H) {
  const Grid& g = f_eta.grid();
  const std::vector<double> u = log_blur_ratio(f_eta, H);
  const std::vector<double> dphi = pv_transform(g, u);

  KkError err;
  double edge = 0.0;
  const int margin = g.n_points / 20;
  for (int k = 0; k < g.n_points; ++k) {
    const double w = trap_weight(g, k);
    const double c = 0.25 * w * u[static_cast<size_t>(k)] * u[static_cast<size_t>(k)];
    err.closed += c;
    err.direct += w * dphi[static_cast<size_t>(k)] * dphi[static_cast<size_t>(k)];
    if (k < margin || k >= g.n_points - margin) edge += c;
  }
  if (err.closed > 0.0) {
    err.relative_gap = std::abs(err.closed - err.direct) / err.closed;
    err.edge_fraction = edge / err.closed;
  }
  return err;
}

}  // namespace linemom
