// Command-line experiment runner: single solver runs, epsilon sweeps with
// log-log slope fits, invariant re-verification of saved reports, and
// finite-difference oracle validation.

#include "rarn/harness.hpp"
#include "rarn/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBudget = 2;
constexpr int kExitViolation = 3;

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<std::string> problem;
  std::string format = "both";  // json | csv | both
};

int cmd_run(const CommonOpts& opts) {
  rarn::ConfigFile cfg = rarn::ConfigFile::parse_file(opts.config_path);
  rarn::RunSpec spec =
      rarn::run_spec_from_config(cfg, opts.solver, opts.problem, opts.seed);
  std::vector<std::string> ignore = {"sweep"};
  if (opts.problem.has_value()) ignore.push_back("problem");
  cfg.check_consumed(ignore);
  rarn::RunReport report = rarn::run_solver(spec);

  if (opts.format == "json" || opts.format == "both") {
    write_file(fs::path(opts.out_dir) / "report.json", rarn::report_to_json(report));
  }
  if (opts.format == "csv" || opts.format == "both") {
    std::ostringstream csv;
    rarn::write_trace_csv(report, csv);
    write_file(fs::path(opts.out_dir) / "trace.csv", csv.str());
  }

  std::cout << "solver=" << report.solver << " problem=" << report.problem
            << " status=" << rarn::to_string(report.status)
            << " iters=" << report.records.size() << " f=" << report.final_f
            << " grad_norm=" << report.final_grad_norm
            << " hv=" << report.hess_vec_products << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  return report.status == rarn::RunStatus::Converged ? kExitOk : kExitBudget;
}

int cmd_sweep(const CommonOpts& opts) {
  rarn::ConfigFile cfg = rarn::ConfigFile::parse_file(opts.config_path);
  rarn::SweepSpec spec = rarn::sweep_spec_from_config(cfg, opts.solver, opts.seed);
  cfg.check_consumed();
  rarn::SweepResult result = rarn::run_sweep(spec);

  std::ostringstream csv;
  rarn::write_sweep_csv(result, csv);
  write_file(fs::path(opts.out_dir) / "sweep.csv", csv.str());

  std::cout << "points=" << result.points.size()
            << " converged=" << result.fit_points
            << " iter_slope=" << result.iter_slope
            << " hv_slope=" << result.hv_slope
            << (result.partial ? " (partial)" : "") << "\n";
  return result.partial ? kExitBudget : kExitOk;
}

int cmd_check(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "cannot open report: " << report_path << "\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  rarn::RunReport report = rarn::report_from_json(buffer.str());
  auto violations = rarn::verify_invariants(report);
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  std::cout << (violations.empty() ? "clean" : "violations found") << " ("
            << violations.size() << ")\n";
  return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_fdtest(const CommonOpts& opts, int points) {
  rarn::ConfigFile cfg = rarn::ConfigFile::parse_file(opts.config_path);
  std::unique_ptr<rarn::Problem> problem;
  if (opts.problem.has_value()) {
    rarn::ConfigSection synthetic("problem");
    synthetic.insert("kind", *opts.problem, 0);
    problem = rarn::make_problem(synthetic);
  } else {
    problem = rarn::make_problem(cfg.section("problem"));
  }

  std::mt19937_64 rng(opts.seed.value_or(0));
  double worst_grad = 0.0, worst_hess = 0.0;
  for (int i = 0; i < points; ++i) {
    rarn::Vec x = problem->manifold().random_point(rng);
    rarn::Point p = rarn::make_point(problem->manifold(), x);
    worst_grad = std::max(worst_grad, rarn::check_gradient_fd(*problem, p, rng));
    worst_hess = std::max(worst_hess, rarn::check_hessvec_fd(*problem, p, rng));
  }
  std::cout << "problem=" << problem->name() << " points=" << points
            << " max_grad_err=" << worst_grad << " max_hess_err=" << worst_hess
            << "\n";
  const bool ok = worst_grad <= 1e-4 && worst_hess <= 1e-3;
  std::cout << (ok ? "clean" : "finite-difference check failed") << "\n";
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian second-order solver harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string report_path;
  int fd_points = 5;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config_path, "config file path");
    if (needs_config) c->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", [&opts](const std::vector<std::string>& vals) {
      opts.seed = std::stoull(vals.front());
      return true;
    }, "seed override");
    sub->add_option("--solver", [&opts](const std::vector<std::string>& vals) {
      opts.solver = vals.front();
      return true;
    }, "solver override (rar|rtr)");
    sub->add_option("--problem", [&opts](const std::vector<std::string>& vals) {
      opts.problem = vals.front();
      return true;
    }, "problem override (rayleigh|holder_well)");
    sub->add_option("--format", opts.format, "report format (json|csv|both)");
  };

  CLI::App* run = app.add_subcommand("run", "single solver run");
  add_common(run, true);
  CLI::App* sweep = app.add_subcommand("sweep", "epsilon sweep with slope fit");
  add_common(sweep, true);
  CLI::App* check = app.add_subcommand("check", "re-verify a saved report");
  check->add_option("--report", report_path, "report.json path")->required();
  CLI::App* fdtest = app.add_subcommand("fdtest", "finite-difference validation");
  add_common(fdtest, true);
  fdtest->add_option("--points", fd_points, "number of random base points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (check->parsed()) return cmd_check(report_path);
    if (fdtest->parsed()) return cmd_fdtest(opts, fd_points);
  } catch (const rarn::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
