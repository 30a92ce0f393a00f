#pragma once

#include <vector>

#include "linemom/profile.hpp"

namespace linemom {

/// Measured and reference intensities on a shared frequency grid.
class TransmissionPair {
 public:
  TransmissionPair(SampledProfile f_eta, SampledProfile f_ref);

  const SampledProfile& f_eta() const { return f_eta_; }
  const SampledProfile& f_ref() const { return f_ref_; }
  /// Pointwise ratio F_eta / F_ref.
  SampledProfile eta() const;

 private:
  SampledProfile f_eta_;
  SampledProfile f_ref_;
};

/// Spectral phase in radians on a frequency grid.
struct PhaseProfile {
  Grid grid;
  std::vector<double> values;
};

struct KkError {
  double closed = 0.0;        // (1/4) integral of log^2(blurred/raw)
  double direct = 0.0;        // integral of the PV-transform discrepancy^2
  double relative_gap = 0.0;  // |closed - direct| / closed
  double edge_fraction = 0.0; // share of `closed` from the outer 5% of bins
};

/// Phase retrieval: phi(w) = -(1/2pi) PV int log(eta(w')) / (w' - w) dw'.
/// The principal value skips the singular bin; denominators are built from
/// index differences so the PV kernel is antisymmetric exactly.
PhaseProfile kk_phase(const SampledProfile& eta);

/// Transmission seen through the instrument:
/// eta_H = blur(F_eta) / blur(F_ref), with H a unit-mass kernel. The blur is
/// renormalized by the locally integrated kernel mass so that constant
/// inputs are exact fixed points on the finite grid.
SampledProfile blurred_transmission(const TransmissionPair& pair,
                                    const SampledProfile& H);

/// Phase error caused by the instrumental blur: the same PV transform
/// applied to log(blur(F_eta)/F_eta). Assumes a slowly varying reference.
PhaseProfile phase_discrepancy(const SampledProfile& f_eta,
                               const SampledProfile& H);

/// Quadratic phase error; `closed` is the primary value, `direct` is the
/// consistency diagnostic from the explicit PV transform.
KkError kk_quadratic_error(const SampledProfile& f_eta,
                           const SampledProfile& H);

/// Edge-renormalized blur used by the KK operations (exposed for tests).
SampledProfile kk_blur(const SampledProfile& F, const SampledProfile& H);

}  // namespace linemom
