#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "linemom/errors.hpp"
#include "linemom/kramers_kronig.hpp"
#include "linemom/profile.hpp"

using namespace linemom;

namespace {

ProfileSpec gaussian_spec(double center, double sigma, double mass = 1.0) {
  return ProfileSpec{Shape::gaussian, center,
                     sigma * 2.0 * std::sqrt(2.0 * std::numbers::ln2), 1, mass};
}

// Gaussian absorption dip: eta(w) = exp(-depth * exp(-w^2 / 2 sigma^2)).
SampledProfile gaussian_dip(const Grid& g, double depth, double sigma) {
  std::vector<double> v(static_cast<size_t>(g.n_points));
  for (int k = 0; k < g.n_points; ++k) {
    const double w = g.x(k);
    v[static_cast<size_t>(k)] =
        std::exp(-depth * std::exp(-0.5 * w * w / (sigma * sigma)));
  }
  return SampledProfile(g, std::move(v), ProfileKind::density);
}

SampledProfile identity_kernel(double half_width, double step) {
  const int half_n = static_cast<int>(std::round(half_width / step));
  const Grid g(-half_n * step, half_n * step, 2 * half_n + 1);
  return generate(ProfileSpec{Shape::delta_bin, 0.0, 0.0, 1, 1.0}, g);
}

SampledProfile gaussian_kernel(double sigma, double half_width, double step) {
  const int half_n = static_cast<int>(std::round(half_width / step));
  const Grid g(-half_n * step, half_n * step, 2 * half_n + 1);
  return generate(gaussian_spec(0.0, sigma), g);
}

// Independent PV discretization: midpoint samples of the integrand, so the
// singularity always falls between two symmetric nodes.
std::vector<double> pv_midpoint_oracle(const Grid& g,
                                       const std::vector<double>& u) {
  const int n = g.n_points;
  const double h = g.step();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      const double um = 0.5 * (u[static_cast<size_t>(j)] +
                               u[static_cast<size_t>(j + 1)]);
      acc += h * um / ((static_cast<double>(j - i) + 0.5) * h);
    }
    out[static_cast<size_t>(i)] = -acc / (2.0 * std::numbers::pi);
  }
  return out;
}

}  // namespace

TEST_SUITE("kk_phase") {
  TEST_CASE("unit transmission has zero phase") {
    const Grid g(-1.0, 1.0, 801);
    const SampledProfile eta(g, std::vector<double>(801, 1.0),
                             ProfileKind::density);
    const PhaseProfile phi = kk_phase(eta);
    for (double v : phi.values) CHECK(v == 0.0);
  }

  TEST_CASE("constant transmission cancels at the grid center") {
    const Grid g(-1.0, 1.0, 801);
    const SampledProfile eta(g, std::vector<double>(801, 0.5),
                             ProfileKind::density);
    const PhaseProfile phi = kk_phase(eta);
    CHECK(std::abs(phi.values[400]) < 1e-12);
    // The finite window leaves a nonzero edge contribution.
    CHECK(std::abs(phi.values[0]) > 1e-3);
  }

  TEST_CASE("gaussian dip agrees with the midpoint oracle") {
    const Grid g(-2.0, 2.0, 4001);
    const SampledProfile eta = gaussian_dip(g, 0.8, 0.08);
    const PhaseProfile phi = kk_phase(eta);

    std::vector<double> u(static_cast<size_t>(g.n_points));
    for (int k = 0; k < g.n_points; ++k)
      u[static_cast<size_t>(k)] = std::log(eta.value(k));
    const std::vector<double> oracle = pv_midpoint_oracle(g, u);

    double scale = 0.0;
    for (double v : phi.values) scale = std::max(scale, std::abs(v));
    REQUIRE(scale > 0.01);
    for (int k = g.n_points / 4; k < 3 * g.n_points / 4; ++k)
      CHECK(std::abs(phi.values[static_cast<size_t>(k)] -
                     oracle[static_cast<size_t>(k)]) < 0.01 * scale);
  }

  TEST_CASE("antisymmetric response to a symmetric dip") {
    const Grid g(-1.0, 1.0, 1601);
    const SampledProfile eta = gaussian_dip(g, 0.5, 0.1);
    const PhaseProfile phi = kk_phase(eta);
    double scale = 0.0;
    for (double v : phi.values) scale = std::max(scale, std::abs(v));
    for (int k = 0; k < g.n_points; ++k) {
      const double mirrored = phi.values[static_cast<size_t>(g.n_points - 1 - k)];
      CHECK(std::abs(phi.values[static_cast<size_t>(k)] + mirrored) <
            1e-12 * scale + 1e-15);
    }
  }

  TEST_CASE("rejects nonpositive transmission") {
    const Grid g(-1.0, 1.0, 11);
    std::vector<double> v(11, 1.0);
    v[5] = 0.0;
    CHECK_THROWS_AS(kk_phase(SampledProfile(g, v, ProfileKind::density)),
                    InputError);
  }
}

TEST_SUITE("blurred_transmission") {
  TEST_CASE("identity kernel returns the raw transmission") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.1);
    const SampledProfile ref(g, std::vector<double>(2001, 2.0),
                             ProfileKind::density);
    std::vector<double> f_eta(static_cast<size_t>(g.n_points));
    for (int k = 0; k < g.n_points; ++k)
      f_eta[static_cast<size_t>(k)] = dip.value(k) * ref.value(k);
    const TransmissionPair pair(
        SampledProfile(g, f_eta, ProfileKind::density), ref);

    const SampledProfile eta_h =
        blurred_transmission(pair, identity_kernel(0.1, g.step()));
    for (int k = 0; k < g.n_points; ++k)
      CHECK(std::abs(eta_h.value(k) - dip.value(k)) < 1e-12);
  }

  TEST_CASE("constant reference slides out of the ratio") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.1);
    const SampledProfile ref(g, std::vector<double>(2001, 3.0),
                             ProfileKind::density);
    std::vector<double> f_eta(static_cast<size_t>(g.n_points));
    for (int k = 0; k < g.n_points; ++k)
      f_eta[static_cast<size_t>(k)] = dip.value(k) * 3.0;
    const SampledProfile f_eta_p(g, f_eta, ProfileKind::density);
    const TransmissionPair pair(f_eta_p, ref);
    const SampledProfile H = gaussian_kernel(0.02, 0.2, g.step());

    const SampledProfile eta_h = blurred_transmission(pair, H);
    const SampledProfile direct = kk_blur(f_eta_p, H);
    for (int k = 0; k < g.n_points; ++k)
      CHECK(std::abs(eta_h.value(k) - direct.value(k) / 3.0) <
            1e-12 * eta_h.value(k));
  }

  TEST_CASE("blurring makes the dip shallower") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.05);
    const SampledProfile ref(g, std::vector<double>(2001, 1.0),
                             ProfileKind::density);
    const TransmissionPair pair(dip, ref);
    const SampledProfile eta_h =
        blurred_transmission(pair, gaussian_kernel(0.03, 0.3, g.step()));
    double min_raw = 1e300, min_blurred = 1e300;
    for (int k = 0; k < g.n_points; ++k) {
      min_raw = std::min(min_raw, dip.value(k));
      min_blurred = std::min(min_blurred, eta_h.value(k));
    }
    CHECK(min_blurred > min_raw);
  }

  TEST_CASE("rejects mismatched grids") {
    const Grid a(-1.0, 1.0, 101);
    const Grid b(-1.0, 1.0, 102);
    CHECK_THROWS_AS(
        TransmissionPair(
            SampledProfile(a, std::vector<double>(101, 1.0),
                           ProfileKind::density),
            SampledProfile(b, std::vector<double>(102, 1.0),
                           ProfileKind::density)),
        InputError);
  }
}

TEST_SUITE("phase_discrepancy") {
  TEST_CASE("identity kernel leaves no discrepancy") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.1);
    const PhaseProfile dphi =
        phase_discrepancy(dip, identity_kernel(0.1, g.step()));
    for (double v : dphi.values) CHECK(std::abs(v) < 1e-10);
  }

  TEST_CASE("constant spectrum has no discrepancy") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile flat(g, std::vector<double>(2001, 2.5),
                              ProfileKind::density);
    const PhaseProfile dphi =
        phase_discrepancy(flat, gaussian_kernel(0.03, 0.3, g.step()));
    for (double v : dphi.values) CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("shrinks with the kernel width") {
    const Grid g(-2.0, 2.0, 4001);
    const SampledProfile dip = gaussian_dip(g, 0.8, 0.08);
    double previous = 1e300;
    for (double s : {0.04, 0.02, 0.01}) {
      const PhaseProfile dphi =
          phase_discrepancy(dip, gaussian_kernel(s, 0.3, g.step()));
      double sup = 0.0;
      for (double v : dphi.values) sup = std::max(sup, std::abs(v));
      CHECK(sup < previous);
      CHECK(sup > 0.0);
      previous = sup;
    }
  }
}

TEST_SUITE("kk_quadratic_error") {
  TEST_CASE("identity kernel gives zero error") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.1);
    const KkError err = kk_quadratic_error(dip, identity_kernel(0.1, g.step()));
    CHECK(err.closed <= 1e-10);
    CHECK(err.direct <= 1e-10);
  }

  TEST_CASE("the two forms agree on a wide grid") {
    const Grid g(-2.0, 2.0, 4001);
    const SampledProfile dip = gaussian_dip(g, 0.8, 0.08);
    const KkError err =
        kk_quadratic_error(dip, gaussian_kernel(0.02, 0.3, g.step()));
    CHECK(err.closed > 0.0);
    CHECK(err.relative_gap < 0.05);
    CHECK(err.edge_fraction < 0.01);
  }

  TEST_CASE("strictly decreasing over the kernel width ladder") {
    const Grid g(-2.0, 2.0, 4001);
    const SampledProfile dip = gaussian_dip(g, 0.8, 0.08);
    double previous = 1e300;
    for (double s : {0.04, 0.02, 0.01}) {
      const KkError err =
          kk_quadratic_error(dip, gaussian_kernel(s, 0.3, g.step()));
      CHECK(err.closed < previous);
      CHECK(err.closed > 0.0);
      previous = err.closed;
    }
  }

  TEST_CASE("rejects a kernel without unit mass") {
    const Grid g(-1.0, 1.0, 2001);
    const SampledProfile dip = gaussian_dip(g, 0.6, 0.1);
    const SampledProfile bad =
        normalize(gaussian_kernel(0.02, 0.2, g.step()), 0.5);
    CHECK_THROWS_AS(kk_quadratic_error(dip, bad), InputError);
  }
}
