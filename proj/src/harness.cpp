#include "rarn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rarn {

RunReport run_solver(const RunSpec& spec) {
  if (!spec.problem) throw ContractViolation("run spec has no problem");
  const Manifold& manifold = spec.problem->manifold();
  Vec x0 = make_start(spec.start, manifold, spec.seed);
  Point start = make_point(manifold, std::move(x0));
  if (spec.solver == "rar") {
    return rar_solve(*spec.problem, spec.rar, start, spec.seed);
  }
  if (spec.solver == "rtr") {
    return rtr_solve(*spec.problem, spec.rtr, start, spec.seed);
  }
  throw ContractViolation("unknown solver '" + spec.solver + "'");
}

RunSpec run_spec_from_config(const ConfigFile& cfg,
                             const std::optional<std::string>& solver_override,
                             const std::optional<std::string>& problem_override,
                             const std::optional<std::uint64_t>& seed_override) {
  RunSpec spec;
  const ConfigSection& run = cfg.section("run");
  spec.solver = solver_override.value_or(run.get_string("solver", "rar"));
  if (spec.solver != "rar" && spec.solver != "rtr") {
    throw ConfigError("[run] solver must be rar or rtr");
  }
  spec.seed = seed_override.value_or(
      static_cast<std::uint64_t>(run.get_long("seed", 0)));
  spec.start = run.get_string("start", "random");

  if (problem_override.has_value()) {
    ConfigSection synthetic("problem");
    synthetic.insert("kind", *problem_override, 0);
    spec.problem = std::shared_ptr<Problem>(make_problem(synthetic));
  } else {
    spec.problem = std::shared_ptr<Problem>(make_problem(cfg.section("problem")));
  }

  // both solver sections are parsed when present so that a shared config
  // file validates fully regardless of the selected solver
  if (cfg.has_section("rar")) spec.rar = make_rar_config(cfg.section("rar"));
  if (cfg.has_section("rtr")) spec.rtr = make_rtr_config(cfg.section("rtr"));
  return spec;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(std::max(x[i], 1e-300));
    ly[i] = std::log(std::max(y[i], 1e-300));
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.eps_g_values.empty()) {
    throw ContractViolation("sweep requires at least one eps_g value");
  }
  for (std::size_t i = 1; i < spec.eps_g_values.size(); ++i) {
    if (!(spec.eps_g_values[i] < spec.eps_g_values[i - 1])) {
      throw ContractViolation("sweep eps_g values must be strictly decreasing");
    }
  }
  if (!spec.eps_h_values.empty() &&
      spec.eps_h_values.size() != spec.eps_g_values.size()) {
    throw ContractViolation("sweep eps_h list must match eps_g in length");
  }

  SweepResult result;
  const double coupling = spec.alpha / (1.0 + spec.alpha);

  for (std::size_t i = 0; i < spec.eps_g_values.size(); ++i) {
    const double eps_g = spec.eps_g_values[i];
    const double eps_h = spec.eps_h_values.empty()
                             ? std::pow(eps_g, coupling)
                             : spec.eps_h_values[i];
    RunSpec point = spec.base;
    point.seed = spec.master_seed + i;
    if (point.solver == "rar") {
      point.rar.eps_g = eps_g;
      point.rar.eps_h = eps_h;
    } else {
      point.rtr.eps_g = eps_g;
      point.rtr.eps_h = eps_h;
    }
    RunReport report = run_solver(point);

    SweepPoint sp;
    sp.eps_g = eps_g;
    sp.eps_h = eps_h;
    sp.outer_iters = static_cast<long long>(report.records.size());
    sp.succ_iters = static_cast<long long>(
        std::count_if(report.records.begin(), report.records.end(),
                      [](const IterationRecord& r) { return r.success; }));
    sp.hv_products = report.hess_vec_products;
    sp.converged = report.status == RunStatus::Converged;
    for (const auto& r : report.records) {
      sp.max_reg_param = std::max(sp.max_reg_param, r.reg_param);
    }
    if (!sp.converged) result.partial = true;
    result.points.push_back(sp);
  }

  std::vector<double> inv_eps, iters, products;
  for (const auto& p : result.points) {
    if (!p.converged) continue;
    inv_eps.push_back(1.0 / p.eps_g);
    iters.push_back(static_cast<double>(std::max<long long>(p.outer_iters, 1)));
    products.push_back(static_cast<double>(std::max<long long>(p.hv_products, 1)));
  }
  result.fit_points = static_cast<int>(inv_eps.size());
  if (result.fit_points >= 4) {
    result.iter_slope = fit_loglog_slope(inv_eps, iters);
    result.hv_slope = fit_loglog_slope(inv_eps, products);
  } else {
    result.iter_slope = std::numeric_limits<double>::quiet_NaN();
    result.hv_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

SweepSpec sweep_spec_from_config(const ConfigFile& cfg,
                                 const std::optional<std::string>& solver_override,
                                 const std::optional<std::uint64_t>& seed_override) {
  SweepSpec spec;
  spec.base = run_spec_from_config(cfg, solver_override, std::nullopt, seed_override);
  const ConfigSection& sweep = cfg.section("sweep");
  auto eps = sweep.get_double_list("eps_g");
  if (eps.empty()) throw ConfigError("[sweep] eps_g list is required");
  spec.eps_g_values = std::move(eps);
  spec.eps_h_values = sweep.get_double_list("eps_h");
  spec.alpha = sweep.get_double("alpha", 1.0);
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
    throw ConfigError("[sweep] alpha must lie in (0, 1]");
  }
  spec.master_seed = seed_override.value_or(
      static_cast<std::uint64_t>(cfg.section("run").get_long("seed", 0)));
  return spec;
}

void write_sweep_csv(const SweepResult& result, std::ostream& os) {
  os << "eps_g,eps_h,outer_iters,succ_iters,hv_products\n";
  os.precision(17);
  for (const auto& p : result.points) {
    os << p.eps_g << ',' << p.eps_h << ',' << p.outer_iters << ','
       << p.succ_iters << ',' << p.hv_products << '\n';
  }
}

}  // namespace rarn
