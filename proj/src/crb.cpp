#include "linemom/crb.hpp"

#include <cmath>
#include <string>

#include "linemom/errors.hpp"

namespace linemom {

namespace {

double trap_weight(const Grid& g, int k) {
  const double h = g.step();
  return (k == 0 || k == g.n_points - 1) ? 0.5 * h : h;
}

void check_normalization(const InfluenceCoefficients& I,
                         const SampledProfile& f) {
  const double expected = I.tau * I.n_events;
  const double q = quadrature(f);
  if (std::abs(q - expected) > 1e-6 * expected)
    throw InputError("spectrum normalization mismatch: quadrature(f) = " +
                     std::to_string(q) + ", expected tau*N = " +
                     std::to_string(expected));
}

double integrate_i2f(const InfluenceCoefficients& I, const SampledProfile& f) {
  double acc = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    const double v = I.evaluate(f.grid().x(k));
    acc += trap_weight(f.grid(), k) * v * v * f.value(k);
  }
  return acc;
}

}  // namespace

double InfluenceCoefficients::evaluate(double x) const {
  const double d = x - basis_shift;
  double acc = 0.0;
  for (size_t j = coeffs.size(); j-- > 0;) acc = acc * d + coeffs[j];
  return acc / n_events;
}

double linear_combination(const std::vector<double>& mu,
                          const MomentVector& M) {
  if (mu.size() != M.values.size())
    throw InputError("combination weight length does not match moment order");
  double acc = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) acc += mu[i] * M.values[i];
  return acc;
}

InfluenceCoefficients influence_function(std::vector<double> mu,
                                         const ConversionMatrix& c_inverse,
                                         double n_events, double tau) {
  if (!(n_events > 0.0)) throw InputError("influence function requires N > 0");
  if (!(tau > 0.0)) throw InputError("influence function requires tau > 0");
  const size_t n = static_cast<size_t>(c_inverse.order_max + 1);
  if (mu.size() != n)
    throw InputError("combination weight length does not match matrix order");

  InfluenceCoefficients I;
  I.coeffs.assign(n, 0.0);
  for (size_t j = 0; j < n; ++j)
    for (size_t i = j; i < n; ++i)
      I.coeffs[j] += mu[i] * c_inverse.at(static_cast<int>(i),
                                          static_cast<int>(j));
  I.mu = std::move(mu);
  I.basis_shift = c_inverse.basis_shift;
  I.n_events = n_events;
  I.tau = tau;
  return I;
}

double crb_unconstrained(const InfluenceCoefficients& I,
                         const SampledProfile& f) {
  check_normalization(I, f);
  return integrate_i2f(I, f);
}

InfluenceCoefficients effective_influence(const InfluenceCoefficients& I,
                                          double beta, double n_events,
                                          double tau) {
  if (!(n_events > 0.0)) throw InputError("effective influence requires N > 0");
  if (!(tau > 0.0)) throw InputError("effective influence requires tau > 0");
  InfluenceCoefficients eff = I;
  // I.evaluate divides the polynomial by I.n_events, so shifting the
  // function by -beta/(tau*N) means shifting coeffs[0] by that times N.
  eff.coeffs[0] -= beta / (tau * n_events) * I.n_events;
  eff.beta = beta;
  return eff;
}

double crb_constrained(const InfluenceCoefficients& I, const SampledProfile& f,
                       double beta) {
  check_normalization(I, f);
  return integrate_i2f(effective_influence(I, beta, I.n_events, I.tau), f);
}

CrbReport crb_report(const SampledProfile& f_counts, const SampledProfile& H,
                     int order_max, double shift,
                     const std::vector<double>* beta_truth) {
  if (f_counts.kind() != ProfileKind::counts)
    throw InputError("crb_report expects a counts profile");
  if (beta_truth && static_cast<int>(beta_truth->size()) != order_max)
    throw InputError("beta_truth must supply one value per moment 1..K");

  const Grid& g = f_counts.grid();
  double total = 0.0;
  for (double c : f_counts.values()) total += c;
  if (!(total > 0.0)) throw InputError("count profile is all zeros");

  const double tau = quadrature(H);
  const double n_events = total / tau;

  // Density estimate: counts per bin width, rescaled so the trapezoid mass
  // equals the detected total exactly (boundary weights would otherwise
  // leave it short by half the edge counts).
  std::vector<double> density(f_counts.values());
  for (double& v : density) v /= g.step();
  SampledProfile f = normalize(SampledProfile(g, std::move(density),
                                              ProfileKind::density),
                               total);

  const ConversionMatrix C = conversion_matrix(H, order_max, shift);
  const ConversionMatrix Cinv = invert_lower_triangular(C);
  const MomentVector m_quad = raw_moments(f, order_max, shift);

  CrbReport report;
  report.n_events = n_events;
  report.order_max = order_max;
  report.tau = tau;
  report.basis_shift = shift;
  report.grid = g;
  if (beta_truth) report.beta_convention = "ground-truth";

  for (int i = 1; i <= order_max; ++i) {
    std::vector<double> mu(static_cast<size_t>(order_max + 1), 0.0);
    mu[static_cast<size_t>(i)] = 1.0;
    InfluenceCoefficients I = influence_function(mu, Cinv, n_events, tau);
    // Plug-in beta via the same quadrature that enters the bounds, so the
    // reproducing property and the lowering identity hold to roundoff.
    double beta_hat = 0.0;
    for (int j = 0; j <= order_max; ++j)
      beta_hat += I.coeffs[static_cast<size_t>(j)] * m_quad[j];
    beta_hat /= n_events;
    if (beta_truth) beta_hat = (*beta_truth)[static_cast<size_t>(i - 1)];
    I.beta = beta_hat;

    CrbRow row;
    row.label = "M" + std::to_string(i);
    row.beta_hat = beta_hat;
    row.crb_unconstrained = crb_unconstrained(I, f);
    row.crb_constrained = crb_constrained(I, f, beta_hat);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace linemom
