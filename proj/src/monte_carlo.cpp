#include "linemom/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "linemom/crb.hpp"
#include "linemom/errors.hpp"
#include "linemom/moments.hpp"

namespace linemom {

namespace {

// splitmix64 finalizer; stateless bijective mixer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

double profile_total(const SampledProfile& p) {
  double t = 0.0;
  for (double v : p.values()) t += v;
  return t;
}

// (x_k - shift)^i for all bins and orders, row-major per bin.
std::vector<double> bin_powers(const Grid& g, int order_max, double shift) {
  std::vector<double> pw(static_cast<size_t>(g.n_points) * (order_max + 1));
  for (int k = 0; k < g.n_points; ++k) {
    const double d = g.x(k) - shift;
    double v = 1.0;
    for (int i = 0; i <= order_max; ++i) {
      pw[static_cast<size_t>(k) * (order_max + 1) + i] = v;
      v *= d;
    }
  }
  return pw;
}

// Moment estimate for one resampled spectrum. Unconstrained mode normalizes
// the count sums by the fixed nominal total; constrained mode divides by the
// realized total and then by the recovered zero-order moment.
void estimate_betas(const std::vector<long long>& counts,
                    const std::vector<double>& powers,
                    const ConversionMatrix& c_inv, int order_max,
                    bool constrained, double nominal_total, double* out) {
  std::vector<double> s(static_cast<size_t>(order_max + 1), 0.0);
  for (size_t k = 0; k < counts.size(); ++k) {
    const long long c = counts[k];
    if (c == 0) continue;
    const double* pw = &powers[k * (order_max + 1)];
    for (int i = 0; i <= order_max; ++i) s[static_cast<size_t>(i)] += c * pw[i];
  }
  const double norm = constrained ? s[0] : nominal_total;
  std::vector<double> M(static_cast<size_t>(order_max + 1), 0.0);
  for (int i = 0; i <= order_max; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += c_inv.at(i, j) * s[static_cast<size_t>(j)];
    M[static_cast<size_t>(i)] = acc / norm;
  }
  if (constrained)
    for (int i = order_max; i >= 0; --i) M[static_cast<size_t>(i)] /= M[0];
  for (int i = 1; i <= order_max; ++i) out[i - 1] = M[static_cast<size_t>(i)];
}

struct TrialStats {
  std::vector<double> mean;
  std::vector<double> var;
};

// Sequential two-pass reduction over the per-trial table; independent of how
// the table was filled, which is what makes threaded runs bit-identical.
TrialStats reduce(const std::vector<double>& table, int trials, int width) {
  TrialStats st;
  st.mean.assign(static_cast<size_t>(width), 0.0);
  st.var.assign(static_cast<size_t>(width), 0.0);
  for (int t = 0; t < trials; ++t)
    for (int i = 0; i < width; ++i)
      st.mean[static_cast<size_t>(i)] += table[static_cast<size_t>(t) * width + i];
  for (double& m : st.mean) m /= trials;
  for (int t = 0; t < trials; ++t)
    for (int i = 0; i < width; ++i) {
      const double d =
          table[static_cast<size_t>(t) * width + i] - st.mean[static_cast<size_t>(i)];
      st.var[static_cast<size_t>(i)] += d * d;
    }
  for (double& v : st.var) v /= (trials - 1);
  return st;
}

void run_trials(int trials, int threads, const std::function<void(int)>& body) {
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(
                            std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, trials);
  if (n_threads <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w]() {
      for (int t = w; t < trials; t += n_threads) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

void validate_config(const McConfig& cfg) {
  if (cfg.trials < 2) throw InputError("Monte Carlo requires at least 2 trials");
  if (cfg.order_max < 1) throw InputError("Monte Carlo requires order_max >= 1");
}

// Fixed-template bounds shared by both studies.
void attach_bounds(McReport& report, const SampledProfile& f_template,
                   const SampledProfile& H_unit, const McConfig& cfg) {
  const CrbReport bounds =
      crb_report(f_template, H_unit, cfg.order_max, cfg.shift);
  for (int i = 1; i <= cfg.order_max; ++i) {
    McMomentRow row;
    row.order = i;
    row.crb_unconstrained = bounds.rows[static_cast<size_t>(i - 1)].crb_unconstrained;
    row.crb_constrained = bounds.rows[static_cast<size_t>(i - 1)].crb_constrained;
    report.rows.push_back(row);
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t master, std::uint64_t trial,
                     std::uint64_t role)
    : engine_(mix64(mix64(master + kGolden * (trial + 1)) + kGolden * (role + 1))) {}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

long long RngStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw InputError("Poisson mean must be a nonnegative finite number");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // CDF inversion by sequential search.
    double p = std::exp(-mean);
    double cdf = p;
    const double u = uniform();
    long long k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (k > 1000) break;  // cdf has saturated to 1 numerically
    }
    return k;
  }

  // Hormann's PTRS transformed rejection sampler.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (kf < 0.0) continue;
    const long long k = static_cast<long long>(kf);
    if (us >= 0.07 && v <= v_r) return k;
    if (us < 0.013 && v > us) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return k;
  }
}

SampledProfile poisson_resample(const SampledProfile& tmpl, RngStream& rng) {
  std::vector<double> out(tmpl.values().size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = static_cast<double>(rng.poisson(tmpl.values()[k]));
  return SampledProfile(tmpl.grid(), std::move(out), ProfileKind::counts);
}

McReport run_mc_f_noise(const SampledProfile& f_template,
                        const SampledProfile& H, const McConfig& cfg) {
  validate_config(cfg);
  const double nominal = profile_total(f_template);
  if (!(nominal > 0.0)) throw InputError("Monte Carlo template is all zeros");

  // Main-text convention: the kernel enters with unit mass.
  const SampledProfile H_unit = normalize(H, 1.0);
  const ConversionMatrix c_inv = invert_lower_triangular(
      conversion_matrix(H_unit, cfg.order_max, cfg.shift));
  const std::vector<double> powers =
      bin_powers(f_template.grid(), cfg.order_max, cfg.shift);

  const int K = cfg.order_max;
  std::vector<double> table(static_cast<size_t>(cfg.trials) * K, 0.0);
  std::vector<long long> redraws(static_cast<size_t>(cfg.trials), 0);

  run_trials(cfg.trials, cfg.threads, [&](int t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t), 0);
    std::vector<long long> counts(f_template.values().size());
    for (;;) {
      long long total = 0;
      for (size_t k = 0; k < counts.size(); ++k) {
        counts[k] = rng.poisson(f_template.values()[k]);
        total += counts[k];
      }
      // Only the constrained estimator divides by the realized total, so
      // only there is an all-zero draw unusable.
      if (total > 0 || !cfg.constrained) break;
      ++redraws[static_cast<size_t>(t)];
    }
    estimate_betas(counts, powers, c_inv, K, cfg.constrained, nominal,
                   &table[static_cast<size_t>(t) * K]);
  });

  McReport report;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  report.n_events = nominal;
  report.constrained = cfg.constrained;
  report.noise_on_kernel = false;
  report.var_rel_se = std::sqrt(2.0 / (cfg.trials - 1));
  for (long long r : redraws) report.rejected_trials += r;
  attach_bounds(report, f_template, H_unit, cfg);

  const TrialStats st = reduce(table, cfg.trials, K);
  for (int i = 0; i < K; ++i) {
    report.rows[static_cast<size_t>(i)].mean_empirical = st.mean[static_cast<size_t>(i)];
    report.rows[static_cast<size_t>(i)].var_empirical = st.var[static_cast<size_t>(i)];
  }
  return report;
}

McReport run_mc_fH_noise(const SampledProfile& f_template,
                         const SampledProfile& H_template,
                         const McConfig& cfg) {
  validate_config(cfg);
  const double nominal_f = profile_total(f_template);
  const double nominal_h = profile_total(H_template);
  if (!(nominal_f > 0.0) || !(nominal_h > 0.0))
    throw InputError("Monte Carlo template is all zeros");

  const Grid& gh = H_template.grid();
  const SampledProfile H_fixed = normalize(
      SampledProfile(gh, H_template.values(), ProfileKind::density), 1.0);
  const ConversionMatrix c_inv_fixed = invert_lower_triangular(
      conversion_matrix(H_fixed, cfg.order_max, cfg.shift));
  const std::vector<double> powers =
      bin_powers(f_template.grid(), cfg.order_max, cfg.shift);

  const int K = cfg.order_max;
  std::vector<double> table_noisy(static_cast<size_t>(cfg.trials) * K, 0.0);
  std::vector<double> table_fixed(static_cast<size_t>(cfg.trials) * K, 0.0);
  std::vector<long long> rejections(static_cast<size_t>(cfg.trials), 0);

  run_trials(cfg.trials, cfg.threads, [&](int t) {
    RngStream rng_f(cfg.seed, static_cast<std::uint64_t>(t), 0);
    RngStream rng_h(cfg.seed, static_cast<std::uint64_t>(t), 1);

    std::vector<long long> counts(f_template.values().size());
    for (;;) {
      long long total = 0;
      for (size_t k = 0; k < counts.size(); ++k) {
        counts[k] = rng_f.poisson(f_template.values()[k]);
        total += counts[k];
      }
      if (total > 0 || !cfg.constrained) break;
      ++rejections[static_cast<size_t>(t)];
    }

    // Kernel resample; zero-total kernels are rejected and redrawn.
    std::vector<double> hv(H_template.values().size());
    for (;;) {
      double total = 0.0;
      for (size_t k = 0; k < hv.size(); ++k) {
        hv[k] = static_cast<double>(rng_h.poisson(H_template.values()[k]));
        total += hv[k];
      }
      if (total > 0.0) break;
      ++rejections[static_cast<size_t>(t)];
    }
    const SampledProfile H_trial =
        normalize(SampledProfile(gh, std::move(hv), ProfileKind::density), 1.0);
    const ConversionMatrix c_inv_trial = invert_lower_triangular(
        conversion_matrix(H_trial, cfg.order_max, cfg.shift));

    estimate_betas(counts, powers, c_inv_trial, K, cfg.constrained, nominal_f,
                   &table_noisy[static_cast<size_t>(t) * K]);
    estimate_betas(counts, powers, c_inv_fixed, K, cfg.constrained, nominal_f,
                   &table_fixed[static_cast<size_t>(t) * K]);
  });

  McReport report;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  report.n_events = nominal_f;
  report.n_kernel_events = nominal_h;
  report.constrained = cfg.constrained;
  report.noise_on_kernel = true;
  report.var_rel_se = std::sqrt(2.0 / (cfg.trials - 1));
  for (long long r : rejections) report.rejected_trials += r;
  attach_bounds(report, f_template, H_fixed, cfg);

  const TrialStats noisy = reduce(table_noisy, cfg.trials, K);
  const TrialStats fixed = reduce(table_fixed, cfg.trials, K);
  for (int i = 0; i < K; ++i) {
    McMomentRow& row = report.rows[static_cast<size_t>(i)];
    row.mean_empirical = noisy.mean[static_cast<size_t>(i)];
    row.var_empirical = noisy.var[static_cast<size_t>(i)];
    row.inflation_ratio = noisy.var[static_cast<size_t>(i)] / fixed.var[static_cast<size_t>(i)];
  }
  return report;
}

}  // namespace linemom
