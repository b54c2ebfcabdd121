#include "tayopt/problem_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tayopt/external_solver.hpp"

namespace tayopt {

namespace {

using nlohmann::json;

// Best-effort source location for error messages: line of the first literal
// occurrence of the quoted key. Returns 0 when the key is not in the text
// (e.g. it was injected by an override).
std::size_t find_line(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  const std::size_t pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + long(pos), '\n'));
}

std::string location_suffix(const std::string& text, const std::string& key) {
  const std::size_t line = find_line(text, key);
  if (line == 0) return "";
  return " (line " + std::to_string(line) + ")";
}

[[noreturn]] void fail_key(const std::string& text, const std::string& path,
                           const std::string& key, const std::string& reason) {
  const std::string full = path.empty() ? key : path + "." + key;
  throw ConfigError("'" + full + "' " + reason + location_suffix(text, key));
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path, const std::string& text) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) known = true;
    if (!known) {
      const std::string full = path.empty() ? item.key() : path + "." + item.key();
      throw ConfigError("unknown key '" + full + "'" + location_suffix(text, item.key()));
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path,
                  const std::string& text) {
  const json* v = find(obj, key);
  if (!v || !v->is_number()) fail_key(text, path, key, "must be a number");
  const double value = v->get<double>();
  if (!std::isfinite(value)) fail_key(text, path, key, "must be finite");
  return value;
}

int get_int(const json& obj, const char* key, const std::string& path, const std::string& text) {
  const json* v = find(obj, key);
  if (!v || !v->is_number_integer()) fail_key(text, path, key, "must be an integer");
  return v->get<int>();
}

std::uint64_t get_seed(const json& obj, const char* key, const std::string& path,
                       const std::string& text) {
  const json* v = find(obj, key);
  if (!v || (!v->is_number_unsigned() && !v->is_number_integer()) ||
      (v->is_number_integer() && v->get<std::int64_t>() < 0))
    fail_key(text, path, key, "must be a non-negative integer");
  return v->get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& path,
              const std::string& text) {
  const json* v = find(obj, key);
  if (!v || !v->is_boolean()) fail_key(text, path, key, "must be true or false");
  return v->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& path,
                       const std::string& text) {
  const json* v = find(obj, key);
  if (!v || !v->is_string()) fail_key(text, path, key, "must be a string");
  return v->get<std::string>();
}

void apply_override(json& root, const std::string& kv) {
  const std::size_t eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like KEY=VALUE, got '" + kv + "'");
  const std::string path = kv.substr(0, eq);
  const std::string value_text = kv.substr(eq + 1);

  std::vector<std::string> segments;
  std::stringstream ss(path);
  std::string segment;
  while (std::getline(ss, segment, '.')) segments.push_back(segment);
  if (segments.empty()) throw ConfigError("override path is empty in '" + kv + "'");
  for (const std::string& s : segments)
    if (s.empty()) throw ConfigError("override path has an empty segment in '" + kv + "'");

  // Values parse as JSON when possible (numbers, booleans, arrays); anything
  // else is taken as a plain string.
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::exception&) {
    value = value_text;
  }

  json* node = &root;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    json& child = (*node)[segments[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object())
      throw ConfigError("override path '" + path + "' descends into a non-object value");
    node = &child;
  }
  (*node)[segments.back()] = value;
}

std::vector<Parameter> parse_parameters(const json& arr, const std::string& text) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("'parameters' must be a non-empty array" + location_suffix(text, "parameters"));
  std::vector<Parameter> out;
  for (const json& p : arr) {
    if (!p.is_object()) throw ConfigError("'parameters' entries must be objects");
    reject_unknown_keys(p, {"name", "lower", "upper"}, "parameters[]", text);
    Parameter param;
    param.name = get_string(p, "name", "parameters[]", text);
    param.lower = get_number(p, "lower", "parameters[]", text);
    param.upper = get_number(p, "upper", "parameters[]", text);
    out.push_back(std::move(param));
  }
  return out;
}

DoeConfig parse_doe(const json& obj, const std::string& text) {
  reject_unknown_keys(obj, {"kind", "size", "levels"}, "optimizer.doe", text);
  DoeConfig doe;
  if (find(obj, "kind")) {
    const std::string kind = get_string(obj, "kind", "optimizer.doe", text);
    if (kind == "lhs")
      doe.kind = DoeKind::Lhs;
    else if (kind == "full_factorial")
      doe.kind = DoeKind::FullFactorial;
    else
      fail_key(text, "optimizer.doe", "kind", "must be 'lhs' or 'full_factorial'");
  }
  if (find(obj, "size")) doe.size = get_int(obj, "size", "optimizer.doe", text);
  if (const json* levels = find(obj, "levels")) {
    if (!levels->is_array()) fail_key(text, "optimizer.doe", "levels", "must be an array");
    doe.levels.clear();
    for (const json& v : *levels) {
      if (!v.is_number_integer())
        fail_key(text, "optimizer.doe", "levels", "must contain only integers");
      doe.levels.push_back(v.get<int>());
    }
  }
  return doe;
}

OptimizerConfig parse_optimizer(const json& obj, const std::string& text) {
  reject_unknown_keys(obj,
                      {"doe", "max_iterations", "stagnation_limit", "improvement_tol",
                       "initial_half_width", "shrink_factor", "min_half_width", "doe_seed",
                       "ei_seed", "parallel_evals"},
                      "optimizer", text);
  OptimizerConfig cfg;
  if (const json* doe = find(obj, "doe")) {
    if (!doe->is_object()) fail_key(text, "optimizer", "doe", "must be an object");
    cfg.doe = parse_doe(*doe, text);
  }
  if (find(obj, "max_iterations"))
    cfg.max_iterations = get_int(obj, "max_iterations", "optimizer", text);
  if (find(obj, "stagnation_limit"))
    cfg.stagnation_limit = get_int(obj, "stagnation_limit", "optimizer", text);
  if (find(obj, "improvement_tol"))
    cfg.improvement_tol = get_number(obj, "improvement_tol", "optimizer", text);
  if (find(obj, "initial_half_width"))
    cfg.initial_half_width = get_number(obj, "initial_half_width", "optimizer", text);
  if (find(obj, "shrink_factor"))
    cfg.shrink_factor = get_number(obj, "shrink_factor", "optimizer", text);
  if (find(obj, "min_half_width"))
    cfg.min_half_width = get_number(obj, "min_half_width", "optimizer", text);
  if (find(obj, "doe_seed")) cfg.doe_seed = get_seed(obj, "doe_seed", "optimizer", text);
  if (find(obj, "ei_seed")) cfg.ei_seed = get_seed(obj, "ei_seed", "optimizer", text);
  if (find(obj, "parallel_evals"))
    cfg.parallel_evals = get_bool(obj, "parallel_evals", "optimizer", text);
  return cfg;
}

}  // namespace

ProblemConfig ProblemConfig::parse_text(const std::string& text,
                                        const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  for (const std::string& kv : overrides) apply_override(root, kv);

  reject_unknown_keys(root, {"parameters", "objective", "solver", "optimizer", "output_dir"}, "",
                      text);

  ProblemConfig config;

  if (const json* params = find(root, "parameters"))
    config.parameters = parse_parameters(*params, text);

  if (const json* objective = find(root, "objective")) {
    if (!objective->is_object()) throw ConfigError("'objective' must be an object");
    reject_unknown_keys(*objective, {"targets_ghz"}, "objective", text);
    const json* targets = find(*objective, "targets_ghz");
    if (!targets || !targets->is_array() || targets->empty())
      fail_key(text, "objective", "targets_ghz", "must be a non-empty array of numbers");
    std::vector<double> values;
    for (const json& v : *targets) {
      if (!v.is_number())
        fail_key(text, "objective", "targets_ghz", "must be a non-empty array of numbers");
      values.push_back(v.get<double>());
    }
    config.targets_ghz = std::move(values);
  }

  const json* solver = find(root, "solver");
  if (!solver || !solver->is_object())
    throw ConfigError("'solver' must be an object naming a builtin instance or external command" +
                      location_suffix(text, "solver"));
  reject_unknown_keys(*solver, {"builtin", "external"}, "solver", text);
  const json* builtin = find(*solver, "builtin");
  const json* external = find(*solver, "external");
  if ((builtin != nullptr) == (external != nullptr))
    throw ConfigError("'solver' must contain exactly one of 'builtin' or 'external'" +
                      location_suffix(text, "solver"));

  if (builtin) {
    if (!builtin->is_object()) fail_key(text, "solver", "builtin", "must be an object");
    reject_unknown_keys(*builtin, {"instance", "derivative_scale", "q_scale"}, "solver.builtin",
                        text);
    BuiltinSolverConfig cfg;
    cfg.instance = get_string(*builtin, "instance", "solver.builtin", text);
    if (find(*builtin, "derivative_scale"))
      cfg.derivative_scale = get_number(*builtin, "derivative_scale", "solver.builtin", text);
    if (find(*builtin, "q_scale"))
      cfg.q_scale = get_number(*builtin, "q_scale", "solver.builtin", text);
    config.builtin = std::move(cfg);
  } else {
    if (!external->is_object()) fail_key(text, "solver", "external", "must be an object");
    reject_unknown_keys(*external, {"command", "workdir", "grid"}, "solver.external", text);
    ExternalSolverConfig cfg;
    cfg.command = get_string(*external, "command", "solver.external", text);
    if (cfg.command.empty()) fail_key(text, "solver.external", "command", "must not be empty");
    if (find(*external, "workdir"))
      cfg.workdir = get_string(*external, "workdir", "solver.external", text);
    const json* grid = find(*external, "grid");
    if (!grid || !grid->is_object()) fail_key(text, "solver.external", "grid", "must be an object");
    reject_unknown_keys(*grid, {"bands"}, "solver.external.grid", text);
    const json* bands = find(*grid, "bands");
    if (!bands || !bands->is_array() || bands->empty())
      fail_key(text, "solver.external.grid", "bands", "must be a non-empty array");
    for (const json& b : *bands) {
      if (!b.is_object())
        fail_key(text, "solver.external.grid", "bands", "must contain objects");
      reject_unknown_keys(b, {"lo_ghz", "hi_ghz", "points"}, "solver.external.grid.bands[]", text);
      GridBand band;
      band.lo_ghz = get_number(b, "lo_ghz", "solver.external.grid.bands[]", text);
      band.hi_ghz = get_number(b, "hi_ghz", "solver.external.grid.bands[]", text);
      if (find(b, "points"))
        band.points = get_int(b, "points", "solver.external.grid.bands[]", text);
      if (band.points < 2)
        fail_key(text, "solver.external.grid.bands[]", "points", "must be at least 2");
      cfg.bands.push_back(band);
    }
    config.external = std::move(cfg);
  }

  if (const json* optimizer = find(root, "optimizer")) {
    if (!optimizer->is_object()) throw ConfigError("'optimizer' must be an object");
    config.optimizer = parse_optimizer(*optimizer, text);
  }

  if (find(root, "output_dir")) config.output_dir = get_string(root, "output_dir", "", text);

  return config;
}

ProblemConfig ProblemConfig::parse_file(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), overrides);
}

namespace {

std::vector<double> band_grid(const std::vector<GridBand>& bands) {
  std::vector<double> freqs;
  for (const GridBand& band : bands) {
    for (int i = 0; i < band.points; ++i) {
      const double t = double(i) / double(band.points - 1);
      freqs.push_back(band.lo_ghz * (1.0 - t) + band.hi_ghz * t);
    }
  }
  return freqs;
}

}  // namespace

Problem materialize(const ProblemConfig& config) {
  std::shared_ptr<Solver> solver;
  std::shared_ptr<ResonatorModel> model;
  std::optional<ParameterSpace> space;
  std::optional<ObjectiveSpec> objective;

  if (config.builtin) {
    try {
      model = std::make_shared<ResonatorModel>(make_builtin_instance(config.builtin->instance));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
    if (!std::isfinite(config.builtin->derivative_scale))
      throw ConfigError("'solver.builtin.derivative_scale' must be finite");
    model->set_derivative_scale(config.builtin->derivative_scale);
    try {
      model->set_q_scale(config.builtin->q_scale);
    } catch (const std::invalid_argument&) {
      throw ConfigError("'solver.builtin.q_scale' must be positive");
    }
    solver = model;

    if (config.parameters) {
      const auto& given = *config.parameters;
      const auto& canon = model->space().parameters();
      bool match = given.size() == canon.size();
      for (std::size_t i = 0; match && i < given.size(); ++i)
        match = given[i].name == canon[i].name && given[i].lower == canon[i].lower &&
                given[i].upper == canon[i].upper;
      if (!match)
        throw ConfigError("'parameters' must match the builtin instance '" +
                          config.builtin->instance + "' exactly (or be omitted)");
    }
    space = model->space();
    objective = config.targets_ghz ? ObjectiveSpec(*config.targets_ghz) : model->objective();
    try {
      locate_targets(model->grid(), *objective);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("objective target outside the solver grid: ") + err.what());
    }
  } else if (config.external) {
    if (!config.parameters)
      throw ConfigError("'parameters' is required with an external solver");
    if (!config.targets_ghz)
      throw ConfigError("'objective.targets_ghz' is required with an external solver");
    try {
      space = ParameterSpace(*config.parameters);
      FrequencyGrid grid(band_grid(config.external->bands));
      objective = ObjectiveSpec(*config.targets_ghz);
      locate_targets(grid, *objective);
      solver = std::make_shared<FileProtocolSolver>(config.external->command,
                                                    config.external->workdir, *space, grid);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
  } else {
    throw ConfigError("config names no solver");
  }

  try {
    config.optimizer.validate(*space);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("invalid optimizer settings: ") + err.what());
  }

  return Problem{std::move(*space), std::move(*objective), std::move(solver), std::move(model),
                 config.optimizer, config.output_dir};
}

}  // namespace tayopt
