#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "linemom/csv.hpp"
#include "linemom/errors.hpp"
#include "linemom/moments.hpp"
#include "linemom/profile.hpp"

using namespace linemom;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

ProfileSpec gaussian_spec(double center, double sigma, double mass = 1.0) {
  return ProfileSpec{Shape::gaussian, center,
                     sigma * 2.0 * std::sqrt(2.0 * std::numbers::ln2), 1, mass};
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("points and step") {
    Grid g(0.0, 1.0, 101);
    CHECK(g.step() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(100) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.nearest_index(0.503) == 50);
  }

  TEST_CASE("rejects degenerate grids") {
    CHECK_THROWS_AS(Grid(0.0, 0.0, 10), InputError);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), InputError);
    CHECK_THROWS_AS(Grid(1.0, 0.0, 10), InputError);
  }

  TEST_CASE("profile validation") {
    Grid g(0.0, 1.0, 3);
    CHECK_THROWS_AS(SampledProfile(g, {1.0, -0.5, 1.0}, ProfileKind::density),
                    InputError);
    CHECK_THROWS_AS(SampledProfile(g, {1.0, 1.0}, ProfileKind::density),
                    InputError);
  }
}

TEST_SUITE("generate") {
  TEST_CASE("gaussian moments match the closed form") {
    const double sigma = 0.2 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const SampledProfile p =
        generate(ProfileSpec{Shape::gaussian, 0.5, 0.2, 1, 1.0},
                 Grid(0.0, 1.0, 2001));
    const MomentVector m = raw_moments(p, 2);
    CHECK(rel_err(m[0], 1.0) < 1e-9);
    CHECK(rel_err(m[1], 0.5) < 1e-7);
    CHECK(rel_err(m[2], 0.25 + sigma * sigma) < 1e-6);
  }

  TEST_CASE("supergaussian of order 1 is a gaussian") {
    const Grid g(0.0, 1.0, 1001);
    for (double fwhm : {0.1, 0.25, 0.4}) {
      const SampledProfile sg = generate(
          ProfileSpec{Shape::supergaussian, 0.45, fwhm, 1, 1.0}, g);
      const SampledProfile ga =
          generate(ProfileSpec{Shape::gaussian, 0.45, fwhm, 1, 1.0}, g);
      for (int k = 0; k < g.n_points; ++k)
        CHECK(std::abs(sg.value(k) - ga.value(k)) <= 1e-12 * ga.value(0) + 1e-12);
    }
  }

  TEST_CASE("delta_bin concentrates the mass in one bin") {
    const Grid g(0.0, 1.0, 101);
    const SampledProfile p =
        generate(ProfileSpec{Shape::delta_bin, 0.5, 0.0, 1, 1.0}, g);
    for (int k = 0; k < g.n_points; ++k)
      if (k != 50) CHECK(p.value(k) == 0.0);
    CHECK(rel_err(quadrature(p), 1.0) < 1e-12);
    const MomentVector m = raw_moments(p, 4);
    for (int i = 0; i <= 4; ++i)
      CHECK(rel_err(m[i], std::pow(0.5, i)) < 1e-12);
  }

  TEST_CASE("mass rule holds across shapes") {
    const Grid g(0.0, 1.0, 2001);
    const ProfileSpec specs[] = {
        {Shape::gaussian, 0.4, 0.1, 1, 2.5},
        {Shape::supergaussian, 0.5, 0.3, 3, 0.7},
        {Shape::lorentzian, 0.5, 0.05, 1, 1.2},
        {Shape::delta_bin, 0.25, 0.0, 1, 3.0},
    };
    for (const auto& spec : specs)
      CHECK(rel_err(quadrature(generate(spec, g)), spec.amplitude_mass) < 1e-9);
  }

  TEST_CASE("tail mass outside the grid is measured") {
    const Grid g(0.0, 1.0, 501);
    CHECK(mass_outside_fraction(ProfileSpec{Shape::lorentzian, 0.5, 0.2, 1, 1.0},
                                g) > 1e-3);
    CHECK(mass_outside_fraction(gaussian_spec(0.5, 0.05), g) < 1e-3);
  }

  TEST_CASE("rejects bad specs") {
    const Grid g(0.0, 1.0, 101);
    CHECK_THROWS_AS(generate(ProfileSpec{Shape::gaussian, 0.5, 0.0, 1, 1.0}, g),
                    InputError);
    CHECK_THROWS_AS(generate(ProfileSpec{Shape::gaussian, 0.5, -1.0, 1, 1.0}, g),
                    InputError);
    CHECK_THROWS_AS(generate(ProfileSpec{Shape::delta_bin, 1.5, 0.0, 1, 1.0}, g),
                    InputError);
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("unit rectangle") {
    const Grid g(0.0, 1.0, 101);
    const SampledProfile p(g, std::vector<double>(101, 1.0),
                           ProfileKind::density);
    CHECK(quadrature(p) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("triangle area") {
    const Grid g(0.0, 1.0, 101);
    std::vector<double> v(101);
    for (int k = 0; k <= 100; ++k)
      v[static_cast<size_t>(k)] = 2.0 - 4.0 * std::abs(g.x(k) - 0.5);
    CHECK(quadrature(SampledProfile(g, v, ProfileKind::density)) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("generated profiles have exact mass") {
    const SampledProfile p = generate(gaussian_spec(0.5, 0.05),
                                      Grid(0.0, 1.0, 2001));
    CHECK(rel_err(quadrature(p), 1.0) < 1e-9);
  }

  TEST_CASE("rejects counts profiles") {
    const Grid g(0.0, 1.0, 3);
    const SampledProfile c(g, {1.0, 2.0, 3.0}, ProfileKind::counts);
    CHECK_THROWS_AS(quadrature(c), InputError);
  }
}

TEST_SUITE("convolve") {
  TEST_CASE("identity kernel reproduces the input") {
    const Grid gf(0.0, 1.0, 2001);
    const Grid gh(-0.2, 0.2, 801);
    const SampledProfile F = generate(gaussian_spec(0.4, 0.07), gf);
    const SampledProfile H =
        generate(ProfileSpec{Shape::delta_bin, 0.0, 0.0, 1, 1.0}, gh);
    const SampledProfile f = convolve(F, H);
    for (int k = 0; k < gf.n_points; ++k)
      CHECK(std::abs(f.value(k) - F.value(k)) <= 1e-12 * F.value(800) + 1e-13);
  }

  TEST_CASE("gaussian convolved with gaussian is gaussian") {
    const Grid gf(0.0, 1.0, 2001);
    const Grid gh(-0.25, 0.25, 1001);
    const SampledProfile F = generate(gaussian_spec(0.3, 0.05), gf);
    const SampledProfile H = generate(gaussian_spec(0.1, 0.02), gh);
    const SampledProfile f = convolve(F, H);

    const double s = std::sqrt(0.05 * 0.05 + 0.02 * 0.02);
    const double peak = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
    for (int k = 0; k < gf.n_points; ++k) {
      const double x = gf.x(k);
      const double expect =
          peak * std::exp(-0.5 * (x - 0.4) * (x - 0.4) / (s * s));
      CHECK(std::abs(f.value(k) - expect) <= 1e-6 * peak);
    }
  }

  TEST_CASE("first measured moment is the sum of centers") {
    const Grid gf(0.0, 1.0, 2001);
    const Grid gh(-0.25, 0.25, 1001);
    const SampledProfile F = generate(gaussian_spec(0.3, 0.05), gf);
    const SampledProfile H = generate(gaussian_spec(0.1, 0.02), gh);
    const SampledProfile f = convolve(F, H);
    const double m1 = raw_moments(f, 1)[1];
    const double M1 = raw_moments(F, 1)[1];
    const double c10 = conversion_matrix(H, 1).at(1, 0);
    CHECK(rel_err(m1, M1 + c10) < 1e-9);
  }

  TEST_CASE("measured moments follow the conversion matrix forward") {
    const Grid gf(0.0, 1.0, 2001);
    const Grid gh(-0.2, 0.2, 801);
    const SampledProfile F =
        generate(ProfileSpec{Shape::supergaussian, 0.45, 0.3, 2, 1.0}, gf);
    const SampledProfile H = generate(gaussian_spec(0.03, 0.02), gh);
    const SampledProfile f = convolve(F, H);
    const int K = 4;
    const MomentVector m = raw_moments(f, K);
    const MomentVector M = raw_moments(F, K);
    const ConversionMatrix C = conversion_matrix(H, K);
    const MomentVector forward = apply_matrix(C, M);
    for (int i = 0; i <= K; ++i) CHECK(rel_err(m[i], forward[i]) < 1e-5);
  }

  TEST_CASE("mass multiplies") {
    const Grid gf(0.0, 1.0, 2001);
    const Grid gh(-0.2, 0.2, 801);
    const SampledProfile F = generate(gaussian_spec(0.5, 0.06, 2.0), gf);
    const SampledProfile H = generate(gaussian_spec(0.0, 0.02, 0.5), gh);
    CHECK(rel_err(quadrature(convolve(F, H)),
                  quadrature(F) * quadrature(H)) < 1e-6);
  }

  TEST_CASE("rejects incompatible grids") {
    const SampledProfile F = generate(gaussian_spec(0.5, 0.05),
                                      Grid(0.0, 1.0, 2001));
    const SampledProfile H_badstep =
        generate(gaussian_spec(0.0, 0.02), Grid(-0.2, 0.2, 800));
    CHECK_THROWS_AS(convolve(F, H_badstep), InputError);

    const SampledProfile H_no_zero =
        generate(gaussian_spec(0.3, 0.02), Grid(0.2, 0.6, 801));
    CHECK_THROWS_AS(convolve(F, H_no_zero), InputError);
  }
}

TEST_SUITE("raster_kernel") {
  TEST_CASE("point source gives a top hat") {
    const Grid g(-0.2, 0.2, 801);  // h = 5e-4
    const SampledProfile S =
        generate(ProfileSpec{Shape::delta_bin, 0.0, 0.0, 1, 1.0}, g);
    const double eps = 0.05;  // 100 bins
    const SampledProfile H = raster_kernel(S, eps);

    CHECK(rel_err(quadrature(H), 2.0 * eps) < 1e-6);
    // Inside the slit window the response is flat at height mass/(2 eps).
    for (double x : {-0.04, -0.02, 0.0, 0.02, 0.04})
      CHECK(rel_err(interpolate(H, x), 1.0) < 1e-9);
    for (double x : {-0.1, 0.1, 0.15})
      CHECK(interpolate(H, x) == 0.0);
    // Normalized to unit mass the top hat has height 1/(2 eps) = 10.
    const SampledProfile Hn = normalize(H, 1.0);
    CHECK(rel_err(interpolate(Hn, 0.0), 10.0) < 1e-9);
  }

  TEST_CASE("narrow slit reduces to the source shape") {
    const Grid g(-0.2, 0.2, 801);
    const SampledProfile S = generate(gaussian_spec(0.0, 0.02), g);
    const double eps = 0.5 * g.step();
    const SampledProfile H = raster_kernel(S, eps);
    const int peak = g.nearest_index(0.0);
    CHECK(rel_err(H.value(peak) / (2.0 * eps), S.value(peak)) < 0.01);
  }

  TEST_CASE("mass scales with the slit width") {
    const Grid g(-0.2, 0.2, 801);
    const SampledProfile S = generate(gaussian_spec(0.0, 0.02, 0.8), g);
    for (double eps : {0.01, 0.025, 0.05})
      CHECK(rel_err(quadrature(raster_kernel(S, eps)),
                    2.0 * eps * quadrature(S)) < 1e-6);
  }

  TEST_CASE("rejects bad slit widths") {
    const Grid g(-0.2, 0.2, 801);
    const SampledProfile S = generate(gaussian_spec(0.0, 0.02), g);
    CHECK_THROWS_AS(raster_kernel(S, 0.0), InputError);
    CHECK_THROWS_AS(raster_kernel(S, -0.05), InputError);
    CHECK_THROWS_AS(raster_kernel(S, 0.21), InputError);
  }
}

TEST_SUITE("normalize") {
  TEST_CASE("rescales mass") {
    const Grid g(0.0, 1.0, 101);
    const SampledProfile p(g, std::vector<double>(101, 2.0),
                           ProfileKind::density);
    const SampledProfile n = normalize(p, 1.0);
    for (int k = 0; k < 101; ++k)
      CHECK(n.value(k) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("normalizing to the current mass is the identity") {
    const SampledProfile p = generate(gaussian_spec(0.5, 0.07, 1.7),
                                      Grid(0.0, 1.0, 501));
    const SampledProfile n = normalize(p, quadrature(p));
    for (int k = 0; k < p.size(); ++k)
      CHECK(std::abs(n.value(k) - p.value(k)) <= 1e-15 * p.value(k));
  }

  TEST_CASE("moments scale linearly, normalized moments are invariant") {
    const SampledProfile p = generate(gaussian_spec(0.4, 0.05, 2.0),
                                      Grid(0.0, 1.0, 2001));
    const SampledProfile n = normalize(p, 0.5);
    const MomentVector mp = raw_moments(p, 3);
    const MomentVector mn = raw_moments(n, 3);
    for (int i = 0; i <= 3; ++i) {
      CHECK(rel_err(mn[i], mp[i] * 0.25) < 1e-12);
      CHECK(rel_err(mn[i] / mn[0], mp[i] / mp[0]) < 1e-12);
    }
  }

  TEST_CASE("rejects zero mass") {
    const Grid g(0.0, 1.0, 11);
    const SampledProfile zero(g, std::vector<double>(11, 0.0),
                              ProfileKind::density);
    CHECK_THROWS_AS(normalize(zero, 1.0), InputError);
    const SampledProfile p(g, std::vector<double>(11, 1.0),
                           ProfileKind::density);
    CHECK_THROWS_AS(normalize(p, 0.0), InputError);
  }
}

TEST_SUITE("profile csv") {
  TEST_CASE("write then read is bit exact") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(0.0, 3.0);
    const Grid g(0.1, 0.9, 257);
    std::vector<double> v(257);
    for (double& x : v) x = dist(gen);
    const SampledProfile p(g, v, ProfileKind::density);

    const auto path = std::filesystem::temp_directory_path() /
                      "linemom_roundtrip_test.csv";
    write_profile_csv(path.string(), p);
    const SampledProfile q = read_profile_csv(path.string(),
                                              ProfileKind::density);
    REQUIRE(q.size() == p.size());
    for (int k = 0; k < p.size(); ++k) CHECK(q.value(k) == p.value(k));
    CHECK(q.grid().x_min == p.grid().x_min);
    CHECK(q.grid().x_max == p.grid().x_max);
    std::filesystem::remove(path);
  }

  TEST_CASE("rejects malformed rows and non-uniform grids") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();

    const auto bad = dir / "linemom_bad.csv";
    write_text_file(bad.string(), "x,value\n0,1\n0.1,oops\n0.2,1\n");
    CHECK_THROWS_WITH_AS(read_profile_csv(bad.string(), ProfileKind::density),
                         doctest::Contains(":3"), InputError);

    const auto skew = dir / "linemom_skew.csv";
    write_text_file(skew.string(), "0,1\n0.1,1\n0.25,1\n0.3,1\n");
    CHECK_THROWS_AS(read_profile_csv(skew.string(), ProfileKind::density),
                    InputError);

    CHECK_THROWS_AS(read_profile_csv((dir / "linemom_absent.csv").string(),
                                     ProfileKind::density),
                    IoError);
    fs::remove(bad);
    fs::remove(skew);
  }
}
