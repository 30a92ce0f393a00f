#pragma once

#include <string>
#include <vector>

#include "linemom/moments.hpp"
#include "linemom/profile.hpp"

namespace linemom {

/// Influence function for a linear combination beta = mu^T M.
/// coeffs[j] = sum_i mu_i (C^{-1})_ij, and the function itself is
/// I(x) = sum_j coeffs[j] * (x - basis_shift)^j / n_events.
struct InfluenceCoefficients {
  std::vector<double> mu;
  std::vector<double> coeffs;
  double basis_shift = 0.0;
  double n_events = 0.0;
  double tau = 1.0;
  double beta = 0.0;

  double evaluate(double x) const;
};

struct CrbRow {
  std::string label;
  double beta_hat = 0.0;
  double crb_unconstrained = 0.0;
  double crb_constrained = 0.0;
};

/// Per-moment bounds for i = 1..order_max with plug-in beta estimates.
struct CrbReport {
  std::vector<CrbRow> rows;
  double n_events = 0.0;
  int order_max = 0;
  double tau = 1.0;
  double basis_shift = 0.0;
  Grid grid;
  std::string beta_convention = "plug-in";
};

/// beta = mu^T M.
double linear_combination(const std::vector<double>& mu, const MomentVector& M);

/// Builds I from the combination weights and the inverse conversion matrix.
InfluenceCoefficients influence_function(std::vector<double> mu,
                                         const ConversionMatrix& c_inverse,
                                         double n_events, double tau = 1.0);

/// Unconstrained semiparametric bound: integral of I^2 f. Requires f to be
/// normalized to the detected intensity, quadrature(f) = tau * n_events
/// within 1e-6 relative.
double crb_unconstrained(const InfluenceCoefficients& I,
                         const SampledProfile& f);

/// Constant offset accounting for the M0 = 1 constraint:
/// I_eff(x) = I(x) - beta / (tau * n_events).
InfluenceCoefficients effective_influence(const InfluenceCoefficients& I,
                                          double beta, double n_events,
                                          double tau);

/// Constrained bound: integral of I_eff^2 f; equals the unconstrained bound
/// minus beta^2/(tau N) whenever the reproducing property holds.
double crb_constrained(const InfluenceCoefficients& I, const SampledProfile& f,
                       double beta);

/// Full per-moment report from binned counts and the kernel. The density f
/// is the count histogram divided by the bin width, rescaled to the exact
/// event total; tau is the kernel mass; beta_hat values are plug-in
/// quadrature estimates from that density unless beta_truth supplies
/// ground-truth values (one per moment 1..order_max).
CrbReport crb_report(const SampledProfile& f_counts, const SampledProfile& H,
                     int order_max, double shift = 0.0,
                     const std::vector<double>* beta_truth = nullptr);

}  // namespace linemom
