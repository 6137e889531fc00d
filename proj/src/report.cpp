#include "rarn/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace rarn {

using nlohmann::json;

std::string to_string(RunStatus s) {
  return s == RunStatus::Converged ? "converged" : "budget";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "converged") return RunStatus::Converged;
  if (s == "budget") return RunStatus::BudgetExhausted;
  throw ContractViolation("unknown run status: " + s);
}

void RunReport::set_counters(const Counters& c) {
  func_evals = c.func_evals;
  grad_evals = c.grad_evals;
  hess_vec_products = c.hess_vec_products;
  meo_calls = c.meo_calls;
  beta_h_final = c.hess_norm_est;
}

bool RunReport::operator==(const RunReport& other) const {
  return solver == other.solver && problem == other.problem &&
         seed == other.seed && config_echo == other.config_echo &&
         records == other.records && status == other.status &&
         final_f == other.final_f && final_grad_norm == other.final_grad_norm &&
         final_x.size() == other.final_x.size() && final_x == other.final_x &&
         certificate == other.certificate && func_evals == other.func_evals &&
         grad_evals == other.grad_evals &&
         hess_vec_products == other.hess_vec_products &&
         meo_calls == other.meo_calls && beta_h_final == other.beta_h_final &&
         warnings == other.warnings;
}

namespace {

json record_to_json(const IterationRecord& r) {
  return json{{"k", r.k},
              {"grad_norm", r.grad_norm},
              {"f", r.f},
              {"reg_param", r.reg_param},
              {"step_norm", r.step_norm},
              {"rho", r.rho},
              {"success", r.success},
              {"subproblem_iters", r.subproblem_iters},
              {"hv_cumulative", r.hv_cumulative},
              {"model_decrease", r.model_decrease},
              {"beta_h_est", r.beta_h_est},
              {"step_kind", r.step_kind}};
}

IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  r.k = j.at("k").get<long long>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.f = j.at("f").get<double>();
  r.reg_param = j.at("reg_param").get<double>();
  r.step_norm = j.at("step_norm").get<double>();
  r.rho = j.at("rho").get<double>();
  r.success = j.at("success").get<bool>();
  r.subproblem_iters = j.at("subproblem_iters").get<long long>();
  r.hv_cumulative = j.at("hv_cumulative").get<long long>();
  r.model_decrease = j.at("model_decrease").get<double>();
  r.beta_h_est = j.at("beta_h_est").get<double>();
  r.step_kind = j.at("step_kind").get<std::string>();
  return r;
}

// rho can be -inf, which JSON numbers cannot carry; encode specials as strings
json encode_double(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json("nan");
  return json(v > 0 ? "inf" : "-inf");
}

double decode_double(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ContractViolation("bad numeric encoding: " + s);
  }
  return j.get<double>();
}

double config_num(const std::map<std::string, std::string>& echo,
                  const std::string& key, double fallback) {
  auto it = echo.find(key);
  if (it == echo.end()) return fallback;
  return std::stod(it->second);
}

}  // namespace

std::string report_to_json(const RunReport& report) {
  json j;
  j["solver"] = report.solver;
  j["problem"] = report.problem;
  j["seed"] = report.seed;
  j["config"] = report.config_echo;
  j["status"] = to_string(report.status);
  j["final_f"] = report.final_f;
  j["final_grad_norm"] = report.final_grad_norm;
  j["final_x"] = std::vector<double>(report.final_x.data(),
                                     report.final_x.data() + report.final_x.size());
  j["certificate"] = json{{"present", report.certificate.present},
                          {"kind", report.certificate.kind},
                          {"lambda_est", report.certificate.lambda_est},
                          {"delta", report.certificate.delta}};
  j["counters"] = json{{"func_evals", report.func_evals},
                       {"grad_evals", report.grad_evals},
                       {"hess_vec_products", report.hess_vec_products},
                       {"meo_calls", report.meo_calls},
                       {"beta_h_final", report.beta_h_final}};
  json recs = json::array();
  for (const auto& r : report.records) {
    json rj = record_to_json(r);
    rj["rho"] = encode_double(r.rho);
    recs.push_back(std::move(rj));
  }
  j["records"] = std::move(recs);
  j["warnings"] = report.warnings;
  return j.dump(2);
}

RunReport report_from_json(const std::string& text) {
  json j = json::parse(text);
  RunReport report;
  report.solver = j.at("solver").get<std::string>();
  report.problem = j.at("problem").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.config_echo =
      j.at("config").get<std::map<std::string, std::string>>();
  report.status = run_status_from_string(j.at("status").get<std::string>());
  report.final_f = j.at("final_f").get<double>();
  report.final_grad_norm = j.at("final_grad_norm").get<double>();
  auto xs = j.at("final_x").get<std::vector<double>>();
  report.final_x = Eigen::Map<const Vec>(xs.data(), xs.size());
  const json& c = j.at("certificate");
  report.certificate.present = c.at("present").get<bool>();
  report.certificate.kind = c.at("kind").get<std::string>();
  report.certificate.lambda_est = c.at("lambda_est").get<double>();
  report.certificate.delta = c.at("delta").get<double>();
  const json& ctr = j.at("counters");
  report.func_evals = ctr.at("func_evals").get<long long>();
  report.grad_evals = ctr.at("grad_evals").get<long long>();
  report.hess_vec_products = ctr.at("hess_vec_products").get<long long>();
  report.meo_calls = ctr.at("meo_calls").get<long long>();
  report.beta_h_final = ctr.at("beta_h_final").get<double>();
  for (const auto& rj : j.at("records")) {
    IterationRecord r = record_from_json(rj);
    r.rho = decode_double(rj.at("rho"));
    report.records.push_back(std::move(r));
  }
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  return report;
}

void write_trace_csv(const RunReport& report, std::ostream& os) {
  os << "k,grad_norm,f,reg_param,step_norm,rho,success,subproblem_iters,"
        "hv_cumulative,model_decrease,beta_h_est,step_kind\n";
  os.precision(17);
  for (const auto& r : report.records) {
    os << r.k << ',' << r.grad_norm << ',' << r.f << ',' << r.reg_param << ','
       << r.step_norm << ',' << r.rho << ',' << (r.success ? 1 : 0) << ','
       << r.subproblem_iters << ',' << r.hv_cumulative << ','
       << r.model_decrease << ',' << r.beta_h_est << ',' << r.step_kind
       << '\n';
  }
}

std::vector<std::string> verify_invariants(const RunReport& report) {
  std::vector<std::string> violations;
  auto flag = [&](long long k, const std::string& what) {
    std::ostringstream os;
    os << "k=" << k << ": " << what;
    violations.push_back(os.str());
  };

  const bool is_rar = report.solver == "rar";
  const auto& echo = report.config_echo;
  const double eps_h = config_num(echo, "eps_h", 1e-3);
  const double omega = config_num(echo, "omega", 1.0);
  const double kappa1 = config_num(echo, "kappa1", is_rar ? 0.5 : 0.25);
  const double kappa2 = config_num(echo, "kappa2", 2.0);
  const double kappa3 = config_num(echo, "kappa3", 4.0);
  const double sigma_lower = config_num(echo, "sigma_lower", 1e-4);
  const double rho1 = config_num(echo, "rho1", 0.1);
  const double rho2 = config_num(echo, "rho2", 0.9);
  const double delta_max = config_num(echo, "delta_max", 10.0);
  const double rho_accept = config_num(echo, "rho_accept", 0.05);

  const double param_tol = 1e-9;
  long long prev_hv = 0;
  double last_accepted_f = std::numeric_limits<double>::infinity();
  bool have_accepted = false;
  double prev_f = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];

    if (r.hv_cumulative < prev_hv) {
      flag(r.k, "hessian-vector counter decreased");
    }
    prev_hv = r.hv_cumulative;

    // the objective changes only on accepted steps and then decreases, so
    // the recorded sequence must be nonincreasing throughout
    if (r.f > prev_f + 1e-10 * std::max(1.0, std::abs(r.f))) {
      flag(r.k, "objective increased between iterations");
    }
    prev_f = r.f;

    const bool accepted_rule =
        is_rar ? (r.rho >= rho1) : (r.rho >= rho_accept);
    if (r.success != accepted_rule) {
      flag(r.k, "acceptance flag contradicts the rho rule");
    }

    if (r.success) {
      if (have_accepted && r.f > last_accepted_f + 1e-10 * std::max(1.0, std::abs(r.f))) {
        flag(r.k, "objective increased across accepted steps");
      }
      // f recorded at iteration start; the accepted value shows up next
      last_accepted_f = r.f;
      have_accepted = true;

      // Cauchy decrease: unregularized model decrease dominates phi(eta)
      double phi = is_rar ? r.reg_param / (2.0 + omega) *
                                std::pow(r.step_norm, 2.0 + omega)
                          : 0.25 * eps_h * r.step_norm * r.step_norm;
      double slack = 1e-10 * std::max(1.0, std::abs(r.f));
      if (r.model_decrease < phi - slack) {
        flag(r.k, "model decrease below the regularizer value on an accepted step");
      }

      // realized decrease; the successor objective is the next record's f
      double f_next = (i + 1 < report.records.size())
                          ? report.records[i + 1].f
                          : report.final_f;
      if (!is_rar) {
        double need = rho_accept * eps_h / 4.0 * r.step_norm * r.step_norm;
        if (r.f - f_next < need - 1e-10 * std::max(1.0, std::abs(r.f))) {
          flag(r.k, "accepted trust-region step decrease below rho*eps_h/4*step^2");
        }
      }
    }

    if (i + 1 < report.records.size()) {
      const auto& nxt = report.records[i + 1];
      double param = r.reg_param, param_next = nxt.reg_param;
      if (is_rar) {
        double expected;
        if (r.rho > rho2) {
          expected = std::max(sigma_lower, kappa1 * param);
        } else if (r.rho >= rho1) {
          expected = param;
        } else {
          expected = kappa2 * param;
        }
        if (std::abs(param_next - expected) > param_tol * std::max(1.0, expected)) {
          // interval rules would allow anything inside; the implementation
          // pins endpoints, so anything else is a corrupted trace
          bool within_interval =
              (r.rho > rho2 && param_next >= std::max(sigma_lower, kappa1 * param) - param_tol &&
               param_next <= param + param_tol) ||
              (r.rho >= rho1 && r.rho <= rho2 && param_next >= param - param_tol &&
               param_next <= kappa2 * param + param_tol) ||
              (r.rho < rho1 && param_next >= kappa2 * param - param_tol &&
               param_next <= kappa3 * param + param_tol);
          if (!within_interval) flag(r.k, "sigma update outside the legal interval");
        }
      } else {
        bool boundary = r.step_norm >= param * (1.0 - 1e-12);
        double expected;
        if (r.rho > 0.75 && boundary) {
          expected = std::min(delta_max, kappa2 * param);
        } else if (r.rho < 0.25) {
          expected = kappa1 * param;
        } else {
          expected = param;
        }
        if (std::abs(param_next - expected) > param_tol * std::max(1.0, expected)) {
          flag(r.k, "radius update breaks the adaptation rule");
        }
      }

      if (!r.success) {
        double scale = std::max(1.0, std::abs(r.f));
        if (std::abs(nxt.f - r.f) > 1e-9 * scale) {
          flag(r.k, "objective changed on a rejected step");
        }
      }
    }
  }

  if (!report.records.empty() &&
      report.records.back().hv_cumulative > report.hess_vec_products) {
    violations.push_back("trace hessian-vector count exceeds the final counter");
  }
  return violations;
}

}  // namespace rarn
