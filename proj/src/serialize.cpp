#include "linemom/serialize.hpp"

namespace linemom {

Json to_json(const Grid& g) {
  return Json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n_points}};
}

Json to_json(const MomentVector& m) {
  return Json{{"order_max", m.order_max},
              {"basis_shift", m.basis_shift},
              {"values", m.values}};
}

Json to_json(const ConversionMatrix& c) {
  return Json{{"order_max", c.order_max},
              {"basis_shift", c.basis_shift},
              {"entries", c.entries}};
}

Json to_json(const CrbReport& report) {
  Json rows = Json::array();
  for (const CrbRow& r : report.rows) {
    rows.push_back(Json{{"label", r.label},
                        {"beta_hat", r.beta_hat},
                        {"crb_unconstrained", r.crb_unconstrained},
                        {"crb_constrained", r.crb_constrained},
                        {"N", report.n_events},
                        {"K", report.order_max},
                        {"tau", report.tau}});
  }
  return Json{{"rows", rows},
              {"n_events", report.n_events},
              {"order_max", report.order_max},
              {"tau", report.tau},
              {"basis_shift", report.basis_shift},
              {"grid", to_json(report.grid)},
              {"beta_convention", report.beta_convention},
              {"density_convention",
               "counts divided by bin width, rescaled to the event total"}};
}

Json to_json(const McReport& report) {
  Json rows = Json::array();
  for (const McMomentRow& r : report.rows) {
    Json row{{"i", r.order},
             {"var_empirical", r.var_empirical},
             {"mean_empirical", r.mean_empirical},
             {"crb_unconstrained", r.crb_unconstrained},
             {"crb_constrained", r.crb_constrained}};
    if (report.noise_on_kernel) row["inflation_ratio"] = r.inflation_ratio;
    rows.push_back(std::move(row));
  }
  Json out{{"rows", rows},
           {"trials", report.trials},
           {"seed", report.seed},
           {"rejected_trials", report.rejected_trials},
           {"N", report.n_events},
           {"constrained", report.constrained},
           {"noise_on_kernel", report.noise_on_kernel},
           {"var_rel_se", report.var_rel_se}};
  if (report.noise_on_kernel) {
    out["N_H"] = report.n_kernel_events;
    out["bounds_convention"] = "fixed-template";
  }
  return out;
}

Json to_json(const KkError& err) {
  return Json{{"epsilon2", err.closed},
              {"epsilon2_direct", err.direct},
              {"relative_gap", err.relative_gap},
              {"edge_fraction", err.edge_fraction}};
}

}  // namespace linemom
