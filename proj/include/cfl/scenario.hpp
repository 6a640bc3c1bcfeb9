#ifndef CFL_SCENARIO_HPP
#define CFL_SCENARIO_HPP

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cfl/builders.hpp"

namespace cfl::cli {

// Minimal TOML subset: [tables], key = string | number | boolean | [array],
// # comments. Enough for flat scenario configs.
struct TomlValue {
  enum class Kind { String, Number, Boolean, Array } kind = Kind::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
};

using Params = std::map<std::string, TomlValue>;  // keys are "table.key"

std::optional<Params> parse_toml(const std::string& text, std::string* error);

struct ScenarioContext {
  Params params;
  std::string outdir;
  uint64_t seed = 0;
  bool plot_data = false;
  std::ostream* log = nullptr;

  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, bool>> checks;

  double num(const std::string& key, double fallback) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  std::vector<double> num_array(const std::string& key, std::vector<double> fallback) const;

  void check(const std::string& name, bool ok);
  void artifact(const std::string& filename, const std::string& content);
  bool all_ok() const;
};

struct ParamSpec {
  std::string key;
  TomlValue::Kind kind;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<ParamSpec> param_specs;
  std::vector<std::string> default_ops;
  std::map<std::string, std::function<void(ScenarioContext&)>> ops;
};

const std::map<std::string, Scenario>& registry();
std::vector<std::string> list_scenarios();

// Exit codes: 0 ok, 2 malformed config, 3 parameter validation, 4 numerical check failed.
int run_scenario(const std::string& name, const std::string& config_path, const std::string& outdir,
                 uint64_t seed, bool plot_data, std::ostream& log);

// JSON serializations (row-major complex pairs + dims + tolerances).
std::string operator_json(const Matrix& m, double rank_tol);
std::string system_json(const builders::SampledSystem& sys);

}  // namespace cfl::cli

#endif
