#include "linemom/scenarios.hpp"

namespace linemom {

SampledProfile Scenario::object_profile() const {
  return generate(object, grid);
}

SampledProfile Scenario::kernel_profile() const {
  return generate(kernel, kernel_grid);
}

SampledProfile Scenario::blurred_density() const {
  return convolve(object_profile(), kernel_profile());
}

SampledProfile Scenario::expected_counts() const {
  const SampledProfile f = blurred_density();
  const double h = grid.step();
  std::vector<double> counts(f.values());
  for (double& c : counts) c *= events * h;
  return SampledProfile(grid, std::move(counts), ProfileKind::counts);
}

SampledProfile Scenario::kernel_counts_template() const {
  const SampledProfile shape = generate(kernel, kernel_scan_grid);
  const double h = kernel_scan_grid.step();
  const double width = kernel_scan_grid.x_max - kernel_scan_grid.x_min;
  const double b = kernel_dark_fraction;
  std::vector<double> counts(shape.values());
  for (double& c : counts)
    c = kernel_events * h * ((1.0 - b) * c + b / width);
  return SampledProfile(kernel_scan_grid, std::move(counts),
                        ProfileKind::counts);
}

Scenario fig2_like_scenario() {
  Scenario s;
  s.grid = Grid(0.0, 1.0, 2001);
  s.kernel_grid = Grid(-0.2, 0.2, 801);
  s.object = ProfileSpec{Shape::supergaussian, 0.40, 0.35, 3, 1.0};
  // The reference line that calibrates the kernel sits slightly off the
  // scan origin, as in a real raster calibration.
  s.kernel = ProfileSpec{Shape::gaussian, 0.1, 0.05, 1, 1.0};
  s.events = 1e5;
  // Calibration raster: reference line at 0.1 of the unit scan range, so
  // difference coordinates span [-0.1, 0.9]; one percent of the calibration
  // counts are dark events spread over the window.
  s.kernel_scan_grid = Grid(-0.1, 0.9, 2001);
  s.kernel_events = 1e3;
  s.kernel_dark_fraction = 0.01;
  return s;
}

}  // namespace linemom
