#pragma once

#include "linemom/profile.hpp"

namespace linemom {

/// Synthetic measurement scenario: object profile, kernel, and the expected
/// counts of the blurred spectrum at a given event budget.
struct Scenario {
  Grid grid;
  Grid kernel_grid;
  ProfileSpec object;
  ProfileSpec kernel;
  double events = 1e5;

  // Kernel calibration scan: the reference line is raster-scanned over the
  // full range, so its counts live on a wide difference-coordinate window
  // and carry a dark-count floor.
  Grid kernel_scan_grid;
  double kernel_events = 1e3;
  double kernel_dark_fraction = 0.01;

  SampledProfile object_profile() const;   // unit mass
  SampledProfile kernel_profile() const;   // unit mass
  SampledProfile blurred_density() const;  // convolve(object, kernel)
  /// Expected counts per bin: events * blurred density * bin width.
  SampledProfile expected_counts() const;
  /// Expected counts of the kernel calibration scan: the clean kernel shape
  /// plus a uniform dark floor, kernel_events in total.
  SampledProfile kernel_counts_template() const;
};

/// Reference scenario: a broad supergaussian object (center 0.40, FWHM 0.35,
/// order 3) scanned with a narrow gaussian kernel (FWHM 0.05) on the
/// normalized [0, 1] domain, 1e5 events.
Scenario fig2_like_scenario();

}  // namespace linemom
