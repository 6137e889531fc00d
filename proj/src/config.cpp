#include "rarn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rarn {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": cannot parse '" + raw + "' as a number");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ConfigSection

void ConfigSection::insert(const std::string& key, const std::string& value, int line) {
  values_[key] = value;
  lines_[key] = line;
}

bool ConfigSection::has(const std::string& key) const {
  consumed_.insert(key);
  return values_.count(key) > 0;
}

std::string ConfigSection::lookup(const std::string& key) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return "";
  return it->second;
}

std::string ConfigSection::get_string(const std::string& key,
                                      const std::string& fallback) const {
  std::string v = lookup(key);
  return v.empty() ? fallback : v;
}

std::string ConfigSection::require_string(const std::string& key) const {
  std::string v = lookup(key);
  if (v.empty()) {
    throw ConfigError("[" + name_ + "] is missing required key '" + key + "'");
  }
  return v;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  std::string v = lookup(key);
  if (v.empty()) return fallback;
  return parse_double(v, "[" + name_ + "] " + key);
}

long long ConfigSection::get_long(const std::string& key, long long fallback) const {
  std::string v = lookup(key);
  if (v.empty()) return fallback;
  try {
    std::size_t pos = 0;
    long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("[" + name_ + "] " + key + ": cannot parse '" + v +
                      "' as an integer");
  }
}

std::vector<double> ConfigSection::get_double_list(const std::string& key) const {
  std::string v = lookup(key);
  std::vector<double> out;
  if (v.empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, "[" + name_ + "] " + key));
  }
  return out;
}

std::vector<std::string> ConfigSection::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) {
      out.push_back("[" + name_ + "] line " + std::to_string(lines_.at(key)) +
                    ": unknown key '" + key + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ConfigFile

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      }
      cfg.sections_.try_emplace(current, ConfigSection(current));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    cfg.sections_.at(current).insert(key, value, lineno);
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

bool ConfigFile::has_section(const std::string& name) const {
  return sections_.count(name) > 0;
}

const ConfigSection& ConfigFile::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError("missing [" + name + "] section");
  return it->second;
}

ConfigSection& ConfigFile::mutable_section(const std::string& name) {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError("missing [" + name + "] section");
  return it->second;
}

void ConfigFile::check_consumed(const std::vector<std::string>& ignore) const {
  std::vector<std::string> problems;
  for (const auto& [name, section] : sections_) {
    if (std::find(ignore.begin(), ignore.end(), name) != ignore.end()) continue;
    auto extra = section.unconsumed();
    problems.insert(problems.end(), extra.begin(), extra.end());
  }
  if (!problems.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

// ---------------------------------------------------------------------------
// Builders

namespace {

Vec linspace(double lo, double hi, Eigen::Index n) {
  Vec v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

Vec vec_from_list(const std::vector<double>& list) {
  return Eigen::Map<const Vec>(list.data(), static_cast<Eigen::Index>(list.size()));
}

}  // namespace

std::unique_ptr<Problem> make_problem(const ConfigSection& s) {
  const std::string kind = s.get_string("kind", "rayleigh");
  const long long n = s.get_long("n", 100);
  if (n < 2) throw ConfigError("[problem] n must be at least 2");

  if (kind == "rayleigh") {
    Vec spectrum;
    if (s.has("spectrum")) {
      spectrum = vec_from_list(s.get_double_list("spectrum"));
      if (spectrum.size() != n) {
        throw ConfigError("[problem] spectrum list length must equal n");
      }
    } else {
      spectrum = linspace(s.get_double("spectrum_lo", 1.0),
                          s.get_double("spectrum_hi", static_cast<double>(n)), n);
    }
    return std::make_unique<RayleighProblem>(Mat(spectrum.asDiagonal()));
  }
  if (kind == "holder_well") {
    const double mu = s.get_double("mu", 0.5);
    Vec b;
    if (s.has("b")) {
      b = vec_from_list(s.get_double_list("b"));
      if (b.size() != n) throw ConfigError("[problem] b list length must equal n");
    } else {
      b = linspace(s.get_double("b_lo", -1.0), s.get_double("b_hi", 2.0), n);
    }
    Vec center = Vec::Zero(n);
    const std::string cspec = s.get_string("center", "zeros");
    if (cspec != "zeros") {
      auto list = s.get_double_list("center");
      if (static_cast<long long>(list.size()) != n) {
        throw ConfigError("[problem] center list length must equal n");
      }
      center = vec_from_list(list);
    }
    return std::make_unique<HolderWellProblem>(center, mu, Mat(b.asDiagonal()));
  }
  throw ConfigError("[problem] unknown kind '" + kind + "'");
}

RetractionKind retraction_from_string(const std::string& s) {
  if (s == "exponential") return RetractionKind::Exponential;
  if (s == "projection") return RetractionKind::Projection;
  throw ConfigError("unknown retraction '" + s + "'");
}

RarConfig make_rar_config(const ConfigSection& s) {
  RarConfig c;
  c.eps_g = s.get_double("eps_g", c.eps_g);
  c.eps_h = s.get_double("eps_h", c.eps_h);
  c.omega = s.get_double("omega", c.omega);
  // inexactness defaults track the regularization order
  c.theta1 = s.get_double("theta1", c.omega);
  c.theta2 = s.get_double("theta2", c.omega);
  c.kappa1 = s.get_double("kappa1", c.kappa1);
  c.kappa2 = s.get_double("kappa2", c.kappa2);
  c.kappa3 = s.get_double("kappa3", c.kappa3);
  c.sigma_lower = s.get_double("sigma_lower", c.sigma_lower);
  c.sigma0 = s.get_double("sigma0", c.sigma0);
  c.rho1 = s.get_double("rho1", c.rho1);
  c.rho2 = s.get_double("rho2", c.rho2);
  c.c_sub = s.get_double("c_sub", c.c_sub);
  c.delta = s.get_double("delta", c.delta);
  c.c_meo = s.get_double("c_meo", c.c_meo);
  c.perturb_rel = s.get_double("perturb_rel", c.perturb_rel);
  c.max_outer = s.get_long("max_outer", c.max_outer);
  c.retraction = retraction_from_string(s.get_string("retraction", "projection"));
  c.validate();
  return c;
}

RtrConfig make_rtr_config(const ConfigSection& s) {
  RtrConfig c;
  c.eps_g = s.get_double("eps_g", c.eps_g);
  c.eps_h = s.get_double("eps_h", c.eps_h);
  c.theta1 = s.get_double("theta1", c.theta1);
  c.kappa1 = s.get_double("kappa1", c.kappa1);
  c.kappa2 = s.get_double("kappa2", c.kappa2);
  c.delta_max = s.get_double("delta_max", c.delta_max);
  c.delta0 = s.get_double("delta0", c.delta0);
  c.rho_accept = s.get_double("rho_accept", c.rho_accept);
  c.c_sub = s.get_double("c_sub", c.c_sub);
  c.delta = s.get_double("delta", c.delta);
  c.c_meo = s.get_double("c_meo", c.c_meo);
  c.max_outer = s.get_long("max_outer", c.max_outer);
  c.retraction = retraction_from_string(s.get_string("retraction", "projection"));
  c.validate();
  return c;
}

Vec make_start(const std::string& start_spec, const Manifold& manifold,
               std::uint64_t seed) {
  if (start_spec == "random" || start_spec.empty()) {
    std::mt19937_64 rng(seed);
    return manifold.random_point(rng);
  }
  std::vector<double> coords;
  std::stringstream ss(start_spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) coords.push_back(parse_double(item, "start"));
  }
  if (static_cast<Eigen::Index>(coords.size()) != manifold.ambient_dim()) {
    throw ConfigError("start coordinate list has the wrong dimension");
  }
  return manifold.project_point(vec_from_list(coords));
}

}  // namespace rarn
