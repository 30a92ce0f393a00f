#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "linemom/profile.hpp"

namespace linemom {

struct McConfig {
  int trials = 4000;
  std::uint64_t seed = 1;
  int order_max = 4;
  bool noise_on_kernel = false;
  bool constrained = true;
  double shift = 0.0;
  int threads = 0;  // 0 = hardware concurrency; output is identical either way
};

struct McMomentRow {
  int order = 0;
  double mean_empirical = 0.0;
  double var_empirical = 0.0;
  double crb_unconstrained = 0.0;
  double crb_constrained = 0.0;
  double inflation_ratio = 0.0;  // kernel-noise runs only, else 0
};

struct McReport {
  std::vector<McMomentRow> rows;  // one per moment order 1..order_max
  int trials = 0;
  std::uint64_t seed = 0;
  long long rejected_trials = 0;  // zero-total resamples that were redrawn
  double n_events = 0.0;          // f template total
  double n_kernel_events = 0.0;   // H template total (kernel-noise runs)
  bool constrained = false;
  bool noise_on_kernel = false;
  double var_rel_se = 0.0;  // sqrt(2/(trials-1)), relative SE of a variance
};

/// Deterministic random substream derived from (seed, trial, role).
/// Draw order is fixed, so results are independent of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t master, std::uint64_t trial, std::uint64_t role);

  /// Uniform double strictly inside (0, 1).
  double uniform();

  /// Poisson variate: CDF inversion below mean 10, Hormann's transformed
  /// rejection (PTRS) above. mean == 0 draws nothing and returns 0.
  long long poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

/// Independent Poisson draw per bin with the template value as the mean.
SampledProfile poisson_resample(const SampledProfile& tmpl, RngStream& rng);

/// Poisson noise on the spectrum only, kernel held fixed.
McReport run_mc_f_noise(const SampledProfile& f_template,
                        const SampledProfile& H, const McConfig& cfg);

/// Poisson noise on both spectrum and kernel counts; each
/// trial rebuilds the conversion matrix from the resampled kernel
/// (renormalized to unit mass). Rows carry the variance inflation ratio
/// against a paired fixed-kernel run sharing the same spectrum draws; the
/// reported bounds are the fixed-template ones.
McReport run_mc_fH_noise(const SampledProfile& f_template,
                         const SampledProfile& H_template,
                         const McConfig& cfg);

}  // namespace linemom
