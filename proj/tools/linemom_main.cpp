// linemom command-line tool: synthesize scenarios, estimate moments through
// the instrumental kernel, evaluate semiparametric precision bounds, run
// Poisson Monte Carlo studies, and analyze finite-resolution phase errors.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "linemom/crb.hpp"
#include "linemom/csv.hpp"
#include "linemom/errors.hpp"
#include "linemom/kramers_kronig.hpp"
#include "linemom/moments.hpp"
#include "linemom/monte_carlo.hpp"
#include "linemom/scenarios.hpp"
#include "linemom/serialize.hpp"

namespace fs = std::filesystem;
using linemom::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::vector<std::string> inputs;
  std::string kernel_path;
  std::string kernel_counts_path;
  std::string object_path;
  std::string grid_str;
  std::string kernel_grid_str;
  std::string preset = "fig2-like";
  std::string object_spec_str;
  std::string kernel_spec_str;
  int order = 4;
  double shift = 0.0;
  std::optional<double> tau;
  int trials = 4000;
  std::optional<std::uint64_t> seed;
  bool constrained = false;
  bool noisy = false;
  double events = 1e5;
  std::string out_dir = ".";
  std::string format = "both";
};

struct RunContext {
  Options opt;
  std::uint64_t resolved_seed = 0;
  std::vector<std::string> replay;  // canonical argv (without --out)
  Json inputs_meta = Json::array();
  std::vector<std::string> outputs;
};

linemom::Grid parse_grid(const std::string& s) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  char colon1 = 0, colon2 = 0;
  std::istringstream ss(s);
  if (!(ss >> lo >> colon1 >> hi >> colon2 >> n) || colon1 != ':' ||
      colon2 != ':' || !ss.eof())
    throw linemom::InputError("cannot parse grid '" + s +
                              "' (expected MIN:MAX:N)");
  return linemom::Grid(lo, hi, n);
}

linemom::ProfileSpec parse_profile_spec(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() < 2)
    throw linemom::InputError(
        "cannot parse profile spec '" + s +
        "' (expected SHAPE:CENTER[:FWHM[:ORDER]], e.g. gaussian:0.5:0.1)");

  linemom::ProfileSpec spec;
  const std::string& shape = parts[0];
  if (shape == "gaussian")
    spec.shape = linemom::Shape::gaussian;
  else if (shape == "lorentzian")
    spec.shape = linemom::Shape::lorentzian;
  else if (shape == "supergaussian")
    spec.shape = linemom::Shape::supergaussian;
  else if (shape == "delta")
    spec.shape = linemom::Shape::delta_bin;
  else
    throw linemom::InputError("unknown profile shape '" + shape + "'");

  try {
    spec.center = std::stod(parts[1]);
    if (parts.size() > 2) spec.fwhm = std::stod(parts[2]);
    if (parts.size() > 3) spec.order = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw linemom::InputError("cannot parse numbers in profile spec '" + s + "'");
  }
  if (spec.shape != linemom::Shape::delta_bin && parts.size() < 3)
    throw linemom::InputError("profile spec '" + s + "' needs a FWHM");
  if (spec.shape == linemom::Shape::supergaussian && parts.size() < 4)
    throw linemom::InputError("supergaussian spec '" + s + "' needs an order");
  spec.amplitude_mass = 1.0;
  return spec;
}

std::string u64_str(std::uint64_t v) { return std::to_string(v); }

void note_input(RunContext& ctx, const std::string& role,
                const std::string& path) {
  ctx.inputs_meta.push_back(Json{{"role", role},
                                 {"path", path},
                                 {"fnv1a64", linemom::file_hash_hex(path)}});
}

bool want_json(const RunContext& ctx) { return ctx.opt.format != "csv"; }
bool want_csv(const RunContext& ctx) { return ctx.opt.format != "json"; }

void emit_json(RunContext& ctx, const std::string& name, const Json& j) {
  linemom::write_text_file((fs::path(ctx.opt.out_dir) / name).string(),
                           j.dump(2) + "\n");
  ctx.outputs.push_back(name);
}

void emit_profile(RunContext& ctx, const std::string& name,
                  const linemom::SampledProfile& p) {
  linemom::write_profile_csv((fs::path(ctx.opt.out_dir) / name).string(), p);
  ctx.outputs.push_back(name);
}

void emit_columns(RunContext& ctx, const std::string& name,
                  const std::vector<std::string>& cols,
                  const std::vector<std::vector<double>>& data) {
  linemom::write_columns_csv((fs::path(ctx.opt.out_dir) / name).string(), cols,
                             data);
  ctx.outputs.push_back(name);
}

void write_manifest(RunContext& ctx, const std::string& command) {
  Json manifest{{"tool", "linemom"},
                {"version", kVersion},
                {"command", command},
                {"replay", ctx.replay},
                {"inputs", ctx.inputs_meta},
                {"outputs", ctx.outputs}};
  linemom::write_text_file(
      (fs::path(ctx.opt.out_dir) / "manifest.json").string(),
      manifest.dump(2) + "\n");
}

void prepare_out_dir(const Options& opt) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec)
    throw linemom::IoError("cannot create output directory " + opt.out_dir +
                           ": " + ec.message());
}

std::uint64_t resolve_seed(const Options& opt) {
  if (opt.seed) return *opt.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void warn_high_order(int order) {
  if (order > 8)
    std::cerr << "linemom: warning: moment order " << order
              << " > 8; the conversion matrix becomes badly conditioned\n";
}

linemom::SampledProfile load_kernel(RunContext& ctx) {
  if (ctx.opt.kernel_path.empty())
    throw linemom::InputError("--kernel is required for this command");
  note_input(ctx, "kernel", ctx.opt.kernel_path);
  linemom::SampledProfile H = linemom::read_profile_csv(
      ctx.opt.kernel_path, linemom::ProfileKind::density);
  if (ctx.opt.tau) H = linemom::normalize(H, *ctx.opt.tau);
  return H;
}

linemom::SampledProfile load_counts(RunContext& ctx) {
  if (ctx.opt.inputs.empty())
    throw linemom::InputError("--input (a counts CSV) is required");
  note_input(ctx, "f_counts", ctx.opt.inputs.front());
  linemom::SampledProfile counts = linemom::read_profile_csv(
      ctx.opt.inputs.front(), linemom::ProfileKind::counts);
  if (!ctx.opt.grid_str.empty()) {
    // --grid acts as a geometry assertion on analysis commands.
    const linemom::Grid want = parse_grid(ctx.opt.grid_str);
    const linemom::Grid& got = counts.grid();
    if (want.n_points != got.n_points ||
        std::abs(want.x_min - got.x_min) > 1e-9 ||
        std::abs(want.x_max - got.x_max) > 1e-9)
      throw linemom::InputError("input grid does not match --grid");
  }
  return counts;
}

// ---------------------------------------------------------------------------

int cmd_simulate(RunContext& ctx) {
  const Options& opt = ctx.opt;
  if (!(opt.events > 0.0))
    throw linemom::InputError("--events must be positive");

  linemom::Scenario sc = linemom::fig2_like_scenario();
  if (opt.preset != "fig2-like")
    throw linemom::InputError("unknown preset '" + opt.preset + "'");
  if (!opt.grid_str.empty()) sc.grid = parse_grid(opt.grid_str);
  if (!opt.kernel_grid_str.empty())
    sc.kernel_grid = parse_grid(opt.kernel_grid_str);
  if (!opt.object_spec_str.empty())
    sc.object = parse_profile_spec(opt.object_spec_str);
  if (!opt.kernel_spec_str.empty())
    sc.kernel = parse_profile_spec(opt.kernel_spec_str);
  sc.events = opt.events;
  if (!sc.grid.same_step(sc.kernel_grid))
    throw linemom::InputError("object and kernel grids must share one step");

  ctx.replay = {"simulate", "--preset", opt.preset, "--grid",
                linemom::format_double(sc.grid.x_min) + ":" +
                    linemom::format_double(sc.grid.x_max) + ":" +
                    std::to_string(sc.grid.n_points),
                "--kernel-grid",
                linemom::format_double(sc.kernel_grid.x_min) + ":" +
                    linemom::format_double(sc.kernel_grid.x_max) + ":" +
                    std::to_string(sc.kernel_grid.n_points),
                "--events", linemom::format_double(sc.events)};
  if (!opt.object_spec_str.empty()) {
    ctx.replay.push_back("--object-spec");
    ctx.replay.push_back(opt.object_spec_str);
  }
  if (!opt.kernel_spec_str.empty()) {
    ctx.replay.push_back("--kernel-spec");
    ctx.replay.push_back(opt.kernel_spec_str);
  }
  if (opt.noisy) {
    ctx.replay.push_back("--noisy");
    ctx.replay.push_back("--seed");
    ctx.replay.push_back(u64_str(ctx.resolved_seed));
  }

  const linemom::SampledProfile object = sc.object_profile();
  const linemom::SampledProfile kernel = sc.kernel_profile();
  linemom::SampledProfile counts = sc.expected_counts();
  if (opt.noisy) {
    linemom::RngStream rng(ctx.resolved_seed, 0, 0);
    counts = linemom::poisson_resample(counts, rng);
  }

  emit_profile(ctx, "F.csv", object);
  emit_profile(ctx, "H.csv", kernel);
  emit_profile(ctx, "f_counts.csv", counts);
  write_manifest(ctx, "simulate");
  return 0;
}

int cmd_moments(RunContext& ctx) {
  const Options& opt = ctx.opt;
  warn_high_order(opt.order);
  const linemom::SampledProfile counts = load_counts(ctx);
  const linemom::SampledProfile H = load_kernel(ctx);
  if (!counts.grid().same_step(H.grid()))
    throw linemom::InputError("counts and kernel grids must share one step");

  ctx.replay = {"moments", "--input", opt.inputs.front(), "--kernel",
                opt.kernel_path, "--order", std::to_string(opt.order),
                "--shift", linemom::format_double(opt.shift)};
  if (opt.tau) {
    ctx.replay.push_back("--tau");
    ctx.replay.push_back(linemom::format_double(*opt.tau));
  }

  const linemom::CountMoments measured =
      linemom::estimate_moments_from_counts(counts, opt.order, opt.shift);
  const linemom::ConversionMatrix C =
      linemom::conversion_matrix(H, opt.order, opt.shift);
  const linemom::MomentVector deconvolved =
      linemom::deconvolve_moments(measured.moments, C);
  const linemom::MomentVector normalized =
      linemom::normalized_moments(deconvolved);

  if (want_json(ctx)) {
    Json j{{"command", "moments"},
           {"n_events", measured.total_counts},
           {"order_max", opt.order},
           {"basis_shift", opt.shift},
           {"measured", linemom::to_json(measured.moments)},
           {"conversion_matrix", linemom::to_json(C)},
           {"deconvolved", linemom::to_json(deconvolved)},
           {"normalized", linemom::to_json(normalized)}};
    emit_json(ctx, "moments.json", j);
  }
  if (want_csv(ctx)) {
    std::vector<double> orders, m, M, Mn;
    for (int i = 0; i <= opt.order; ++i) {
      orders.push_back(i);
      m.push_back(measured.moments[i]);
      M.push_back(deconvolved[i]);
      Mn.push_back(normalized[i]);
    }
    emit_columns(ctx, "moments.csv",
                 {"order", "measured", "deconvolved", "normalized"},
                 {orders, m, M, Mn});
  }
  write_manifest(ctx, "moments");
  return 0;
}

int cmd_crb(RunContext& ctx) {
  const Options& opt = ctx.opt;
  warn_high_order(opt.order);
  const linemom::SampledProfile counts = load_counts(ctx);
  const linemom::SampledProfile H = load_kernel(ctx);

  std::optional<std::vector<double>> beta_truth;
  if (!opt.object_path.empty()) {
    note_input(ctx, "object", opt.object_path);
    const linemom::SampledProfile object = linemom::normalize(
        linemom::read_profile_csv(opt.object_path, linemom::ProfileKind::density),
        1.0);
    const linemom::MomentVector M =
        linemom::raw_moments(object, opt.order, opt.shift);
    beta_truth.emplace();
    for (int i = 1; i <= opt.order; ++i) beta_truth->push_back(M[i]);
  }

  ctx.replay = {"crb", "--input", opt.inputs.front(), "--kernel",
                opt.kernel_path, "--order", std::to_string(opt.order),
                "--shift", linemom::format_double(opt.shift)};
  if (opt.tau) {
    ctx.replay.push_back("--tau");
    ctx.replay.push_back(linemom::format_double(*opt.tau));
  }
  if (!opt.object_path.empty()) {
    ctx.replay.push_back("--object");
    ctx.replay.push_back(opt.object_path);
  }

  const linemom::CrbReport report =
      linemom::crb_report(counts, H, opt.order, opt.shift,
                          beta_truth ? &*beta_truth : nullptr);

  if (want_json(ctx)) {
    Json j = linemom::to_json(report);
    j["inputs"] = ctx.inputs_meta;
    emit_json(ctx, "crb_report.json", j);
  }
  if (want_csv(ctx)) {
    std::vector<double> idx, bh, cu, cc;
    for (size_t i = 0; i < report.rows.size(); ++i) {
      idx.push_back(static_cast<double>(i + 1));
      bh.push_back(report.rows[i].beta_hat);
      cu.push_back(report.rows[i].crb_unconstrained);
      cc.push_back(report.rows[i].crb_constrained);
    }
    emit_columns(ctx, "crb_report.csv",
                 {"moment", "beta_hat", "crb_unconstrained", "crb_constrained"},
                 {idx, bh, cu, cc});
  }
  write_manifest(ctx, "crb");
  return 0;
}

int cmd_mc(RunContext& ctx) {
  const Options& opt = ctx.opt;
  warn_high_order(opt.order);
  const linemom::SampledProfile counts = load_counts(ctx);

  linemom::McConfig cfg;
  cfg.trials = opt.trials;
  cfg.seed = ctx.resolved_seed;
  cfg.order_max = opt.order;
  cfg.constrained = opt.constrained;
  cfg.shift = opt.shift;

  linemom::McReport report;
  if (!opt.kernel_counts_path.empty()) {
    note_input(ctx, "kernel_counts", opt.kernel_counts_path);
    const linemom::SampledProfile h_counts = linemom::read_profile_csv(
        opt.kernel_counts_path, linemom::ProfileKind::counts);
    cfg.noise_on_kernel = true;
    report = linemom::run_mc_fH_noise(counts, h_counts, cfg);
  } else {
    const linemom::SampledProfile H = load_kernel(ctx);
    report = linemom::run_mc_f_noise(counts, H, cfg);
  }

  ctx.replay = {"mc", "--input", opt.inputs.front()};
  if (!opt.kernel_counts_path.empty()) {
    ctx.replay.push_back("--kernel-counts");
    ctx.replay.push_back(opt.kernel_counts_path);
  } else {
    ctx.replay.push_back("--kernel");
    ctx.replay.push_back(opt.kernel_path);
  }
  ctx.replay.insert(ctx.replay.end(),
                    {"--order", std::to_string(opt.order), "--shift",
                     linemom::format_double(opt.shift), "--trials",
                     std::to_string(opt.trials), "--seed",
                     u64_str(ctx.resolved_seed)});
  if (opt.constrained) ctx.replay.push_back("--constrained");

  if (want_json(ctx)) emit_json(ctx, "mc_report.json", linemom::to_json(report));
  if (want_csv(ctx)) {
    std::vector<double> idx, ve, cu, cc, infl;
    for (const auto& row : report.rows) {
      idx.push_back(row.order);
      ve.push_back(row.var_empirical);
      cu.push_back(row.crb_unconstrained);
      cc.push_back(row.crb_constrained);
      infl.push_back(row.inflation_ratio);
    }
    std::vector<std::string> names{"moment", "var_empirical",
                                   "crb_unconstrained", "crb_constrained"};
    std::vector<std::vector<double>> cols{idx, ve, cu, cc};
    if (report.noise_on_kernel) {
      names.push_back("inflation_ratio");
      cols.push_back(infl);
    }
    emit_columns(ctx, "mc_report.csv", names, cols);
  }
  write_manifest(ctx, "mc");
  return 0;
}

int cmd_kk(RunContext& ctx) {
  const Options& opt = ctx.opt;
  if (opt.inputs.empty())
    throw linemom::InputError("--input (a transmission CSV) is required");
  note_input(ctx, "transmission", opt.inputs.front());
  const linemom::TransmissionData data =
      linemom::read_transmission_csv(opt.inputs.front());
  linemom::SampledProfile H = linemom::normalize(load_kernel(ctx), 1.0);

  ctx.replay = {"kk", "--input", opt.inputs.front(), "--kernel",
                opt.kernel_path};

  // Two-column inputs carry the transmission directly; the constant-reference
  // assumption lets eta stand in for F_eta in the discrepancy integrals.
  const linemom::SampledProfile& f_eta =
      data.f_eta ? *data.f_eta : data.eta;

  const linemom::PhaseProfile phi = linemom::kk_phase(data.eta);
  const linemom::PhaseProfile dphi = linemom::phase_discrepancy(f_eta, H);
  const linemom::KkError err = linemom::kk_quadratic_error(f_eta, H);

  if (want_json(ctx)) {
    Json j = linemom::to_json(err);
    j["grid"] = linemom::to_json(phi.grid);
    j["inputs"] = ctx.inputs_meta;
    emit_json(ctx, "kk_report.json", j);
  }
  if (want_csv(ctx)) {
    std::vector<double> omega(static_cast<size_t>(phi.grid.n_points));
    for (int k = 0; k < phi.grid.n_points; ++k)
      omega[static_cast<size_t>(k)] = phi.grid.x(k);
    emit_columns(ctx, "phi.csv", {"omega", "phase"}, {omega, phi.values});
    emit_columns(ctx, "delta_phi.csv", {"omega", "phase"},
                 {omega, dphi.values});
  }
  write_manifest(ctx, "kk");
  return 0;
}

std::string g_command = "parse";

void report_error(int code, const std::string& kind, const std::string& msg) {
  Json err{{"error", Json{{"code", code},
                          {"kind", kind},
                          {"message", msg},
                          {"context", g_command}}}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-based spectral deconvolution with semiparametric "
               "precision bounds"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", opt.inputs, "Input CSV path");
    cmd->add_option("--kernel", opt.kernel_path, "Kernel profile CSV");
    cmd->add_option("--grid", opt.grid_str, "Grid as MIN:MAX:N");
    cmd->add_option("--order", opt.order, "Maximum moment order K");
    cmd->add_option("--shift", opt.shift, "Moment basis shift");
    cmd->add_option("--tau", [&opt](const std::vector<std::string>& v) {
      try {
        size_t pos = 0;
        opt.tau = std::stod(v.front(), &pos);
        return pos == v.front().size();
      } catch (const std::exception&) {
        return false;
      }
    }, "Kernel transmission: rescale the kernel to this mass");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials");
    cmd->add_option("--seed", [&opt](const std::vector<std::string>& v) {
      try {
        size_t pos = 0;
        opt.seed = std::stoull(v.front(), &pos);
        return pos == v.front().size();
      } catch (const std::exception&) {
        return false;
      }
    }, "Random seed (drawn from system entropy when absent)");
    cmd->add_flag("--constrained", opt.constrained,
                  "Normalize by the recovered zero-order moment");
    cmd->add_flag("--noisy", opt.noisy, "Poisson-draw the simulated counts");
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--format", opt.format, "json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    return cmd;
  };

  CLI::App* sim = add_common(app.add_subcommand(
      "simulate", "Synthesize object, kernel, and blurred counts"));
  sim->add_option("--preset", opt.preset, "Scenario preset (fig2-like)");
  sim->add_option("--object-spec", opt.object_spec_str,
                  "Object profile SHAPE:CENTER:FWHM[:ORDER]");
  sim->add_option("--kernel-spec", opt.kernel_spec_str,
                  "Kernel profile SHAPE:CENTER:FWHM[:ORDER]");
  sim->add_option("--kernel-grid", opt.kernel_grid_str,
                  "Kernel grid as MIN:MAX:N");
  sim->add_option("--events", opt.events, "Target total event count");

  CLI::App* moments = add_common(app.add_subcommand(
      "moments", "Estimate measured moments and invert the hierarchy"));
  CLI::App* crb = add_common(app.add_subcommand(
      "crb", "Semiparametric precision bounds for the moments"));
  crb->add_option("--object", opt.object_path,
                  "True object CSV: use ground-truth beta in the bounds");
  CLI::App* mc = add_common(app.add_subcommand(
      "mc", "Poisson Monte Carlo validation of the bounds"));
  mc->add_option("--kernel-counts", opt.kernel_counts_path,
                 "Kernel counts CSV: also resample the kernel per trial");
  CLI::App* kk = add_common(app.add_subcommand(
      "kk", "Finite-resolution Kramers-Kronig phase analysis"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::ostringstream oss;
    const int rc = app.exit(e, oss, oss);
    (void)rc;
    report_error(2, "input", oss.str());
    return 2;
  }

  try {
    RunContext ctx;
    ctx.opt = opt;
    ctx.resolved_seed = resolve_seed(opt);
    prepare_out_dir(opt);
    if (sim->parsed()) {
      g_command = "simulate";
      return cmd_simulate(ctx);
    }
    if (moments->parsed()) {
      g_command = "moments";
      return cmd_moments(ctx);
    }
    if (crb->parsed()) {
      g_command = "crb";
      return cmd_crb(ctx);
    }
    if (mc->parsed()) {
      g_command = "mc";
      return cmd_mc(ctx);
    }
    if (kk->parsed()) {
      g_command = "kk";
      return cmd_kk(ctx);
    }
    report_error(2, "input", "no command given");
    return 2;
  } catch (const linemom::InputError& e) {
    report_error(2, "input", e.what());
    return 2;
  } catch (const linemom::NumericalError& e) {
    report_error(3, "numerical", e.what());
    return 3;
  } catch (const linemom::IoError& e) {
    report_error(4, "io", e.what());
    return 4;
  } catch (const std::exception& e) {
    report_error(2, "input", e.what());
    return 2;
  }
}
