// config.hpp
// INI-style configuration files. Each plain section is one sweep; sections
// named functional:NAME define custom Bell functionals. Comments take whole
// lines starting with ';' or '#'.
//
//   [werner]
//   state = werner
//   param = p
//   grid = 0:1:101
//   quantities = s_chsh,s_chsh_lpo
//   seed = 7
//   out = werner.csv
//
//   ; alpha rows are separated by '|'
//   [functional:tilted]
//   alpha = 1 1 | 1 -1
//   beta = 0.5 0
//   gamma = 0 0

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lpow/sweep.hpp"

namespace lpow {

struct Config {
  std::vector<std::pair<std::string, SweepSpec>> sweeps;  // file order
  std::map<std::string, BellFunctional> functionals;

  /// Preset name or a functional defined in this file.
  BellFunctional functional(std::string_view name) const {
    const auto it = functionals.find(std::string(name));
    if (it != functionals.end()) return it->second;
    return preset_functional(name);
  }
};

namespace detail {

inline std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::istringstream is{std::string(text)};
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, what));
  return out;
}

inline BellFunctional parse_functional(const std::string& name, const boost::property_tree::ptree& sec) {
  const auto alpha = sec.get_optional<std::string>("alpha");
  if (!alpha) throw parameter_error("functional '" + name + "' needs alpha");
  for (const auto& [key, _] : sec) {
    if (key != "alpha" && key != "beta" && key != "gamma") {
      throw parameter_error("functional '" + name + "': unknown key '" + key + "'");
    }
  }
  std::vector<double> a;
  std::size_t cols = 0;
  const auto rows = split(*alpha, '|');
  for (const auto& r : rows) {
    const auto v = parse_numbers(r, "alpha");
    if (cols == 0) cols = v.size();
    if (v.empty() || v.size() != cols) throw parameter_error("functional '" + name + "': alpha rows differ in length");
    a.insert(a.end(), v.begin(), v.end());
  }
  const auto vec = [&](const char* key, std::size_t len) {
    const auto t = sec.get_optional<std::string>(key);
    return t ? parse_numbers(*t, key) : std::vector<double>(len, 0.0);
  };
  try {
    return BellFunctional(rows.size(), cols, std::move(a), vec("beta", rows.size()), vec("gamma", cols), name);
  } catch (const std::exception& e) {
    throw parameter_error("functional '" + name + "': " + e.what());
  }
}

inline SweepSpec parse_sweep(const std::string& name, const boost::property_tree::ptree& sec) {
  static const std::vector<std::string> known{"state",          "param",           "grid",     "quantities",
                                              "seed",           "restarts",        "max_iterations",
                                              "step_tolerance", "value_tolerance", "settings", "bounds",
                                              "threads",        "out"};
  for (const auto& [key, _] : sec) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw parameter_error("section [" + name + "]: unknown key '" + key + "'");
    }
  }
  const auto need = [&](const char* key) {
    const auto v = sec.get_optional<std::string>(key);
    if (!v) throw parameter_error("section [" + name + "] needs '" + key + "'");
    return trim(*v);
  };
  const auto whole = [&](const char* key, double v) -> long long {
    if (v != std::floor(v)) throw parameter_error("section [" + name + "]: '" + key + "' must be a whole number");
    return static_cast<long long>(v);
  };
  SweepSpec s;
  s.state = StateSpec::parse(need("state"));
  s.sweep_param = need("param");
  s.grid = Grid::parse(need("grid"));
  s.quantities = parse_quantity_list(need("quantities"));
  if (auto v = sec.get_optional<std::string>("seed")) {
    const double d = parse_double(trim(*v), "seed");
    if (d < 0) throw parameter_error("seed must be >= 0");
    s.optimizer.seed = static_cast<std::uint64_t>(whole("seed", d));
  }
  if (auto v = sec.get_optional<std::string>("restarts"))
    s.optimizer.restarts = static_cast<int>(whole("restarts", parse_double(trim(*v), "restarts")));
  if (auto v = sec.get_optional<std::string>("max_iterations"))
    s.optimizer.max_iterations = static_cast<int>(whole("max_iterations", parse_double(trim(*v), "max_iterations")));
  if (auto v = sec.get_optional<std::string>("step_tolerance"))
    s.optimizer.step_tolerance = parse_double(trim(*v), "step_tolerance");
  if (auto v = sec.get_optional<std::string>("value_tolerance"))
    s.optimizer.value_tolerance = parse_double(trim(*v), "value_tolerance");
  if (auto v = sec.get_optional<std::string>("settings")) {
    const auto mode = parse_settings_mode(trim(*v));
    if (!mode) throw parameter_error("settings must be 'optimized' or 'bell'");
    s.settings = *mode;
  }
  if (auto v = sec.get_optional<std::string>("bounds")) {
    const auto b = trim(*v);
    if (b != "true" && b != "false") throw parameter_error("bounds must be true or false");
    s.bound_columns = b == "true";
  }
  if (auto v = sec.get_optional<std::string>("threads"))
    s.threads = static_cast<unsigned>(whole("threads", parse_double(trim(*v), "threads")));
  if (auto v = sec.get_optional<std::string>("out")) s.output_path = trim(*v);
  s.validate();
  return s;
}

}  // namespace detail

inline Config parse_config(std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw parameter_error(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config cfg;
  constexpr std::string_view kFunctionalPrefix = "functional:";
  for (const auto& [name, sec] : tree) {
    if (sec.empty()) throw parameter_error("config: '" + name + "' is outside any section or empty");
    if (name.starts_with(kFunctionalPrefix)) {
      const auto fname = name.substr(kFunctionalPrefix.size());
      cfg.functionals.emplace(fname, detail::parse_functional(fname, sec));
    } else {
      cfg.sweeps.emplace_back(name, detail::parse_sweep(name, sec));
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot read '" + path + "'");
  return parse_config(is);
}

}  // namespace lpow
