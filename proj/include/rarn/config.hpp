#ifndef RARN_CONFIG_HPP
#define RARN_CONFIG_HPP

#include "rarn/objective.hpp"
#include "rarn/rar.hpp"
#include "rarn/rtr.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rarn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One [section] of a flat key=value config file. Typed getters record which
/// keys were consumed so that leftovers can be reported as unknown.
class ConfigSection {
 public:
  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_long(const std::string& key, long long fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Keys never consumed by any getter (caller reports them as unknown).
  std::vector<std::string> unconsumed() const;

  void insert(const std::string& key, const std::string& value, int line);
  const std::string& name() const { return name_; }
  explicit ConfigSection(std::string name) : name_(std::move(name)) {}

 private:
  std::string lookup(const std::string& key) const;

  std::string name_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> consumed_;
};

class ConfigFile {
 public:
  static ConfigFile parse_string(const std::string& text);
  static ConfigFile parse_file(const std::string& path);

  bool has_section(const std::string& name) const;
  const ConfigSection& section(const std::string& name) const;
  ConfigSection& mutable_section(const std::string& name);

  /// Throws on keys no getter consumed - typically typos. Sections named in
  /// `ignore` are exempt (e.g. [sweep] during a single run).
  void check_consumed(const std::vector<std::string>& ignore = {}) const;

 private:
  std::map<std::string, ConfigSection> sections_;
};

/// Problem construction from a [problem] section:
///   kind = rayleigh:     n, spectrum_lo/spectrum_hi or spectrum = list
///   kind = holder_well:  n, mu, b_lo/b_hi or b = list, center = list | zeros
std::unique_ptr<Problem> make_problem(const ConfigSection& s);

RarConfig make_rar_config(const ConfigSection& s);
RtrConfig make_rtr_config(const ConfigSection& s);

/// Start point: "random" (drawn from the seed) or an explicit coordinate
/// list projected onto the manifold.
Vec make_start(const std::string& start_spec, const Manifold& manifold,
               std::uint64_t seed);

RetractionKind retraction_from_string(const std::string& s);

}  // namespace rarn

#endif  // RARN_CONFIG_HPP
