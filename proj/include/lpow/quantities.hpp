// quantities.hpp
// Named scalar quantities evaluated on a state, and the textual state-spec
// vocabulary shared by the report and sweep front ends.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lpow/witness.hpp"

namespace lpow {

// ---------------------------------------------------------------------------
// Number formatting shared by report and CSV output.

/// Shortest decimal string that round-trips the double; "nan", "inf", "-inf".
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return {buf.data(), end};
}

/// Strict decimal parse of the whole string.
inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw parameter_error("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == s.npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// ---------------------------------------------------------------------------
// State specs: "family[:key=value[,key=value...]]"

struct StateSpec {
  std::string family;
  std::map<std::string, double> params;
  std::string kets;  // pure_product only: one character per qubit from 0 1 + - r l

  static StateSpec parse(std::string_view text);

  /// Keys the family accepts, in canonical order.
  static std::vector<std::string> parameter_names(std::string_view family);

  StateSpec with(const std::string& key, double value) const {
    StateSpec s = *this;
    s.params[key] = value;
    return s;
  }

  StateFamily to_family() const;
  DensityMatrix build() const { return make_state(to_family()); }
  std::string to_string() const;
};

inline std::vector<std::string> StateSpec::parameter_names(std::string_view family) {
  if (family == "singlet" || family == "sigma" || family == "ghz" || family == "mixed") return {};
  if (family == "werner" || family == "transition") return {"p"};
  if (family == "cg") return {"theta", "lambda"};
  if (family == "classical") return {"theta", "beta"};
  if (family == "pure_product") return {};
  throw parameter_error("unknown state family '" + std::string(family) + "'");
}

inline StateSpec StateSpec::parse(std::string_view text) {
  StateSpec spec;
  const auto colon = text.find(':');
  spec.family = trim(text.substr(0, colon));
  const auto allowed = parameter_names(spec.family);
  if (colon == text.npos) return spec;
  for (const auto& item : split(text.substr(colon + 1), ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw parameter_error("state parameter '" + t + "' is not key=value");
    const auto key = trim(std::string_view(t).substr(0, eq));
    const auto val = trim(std::string_view(t).substr(eq + 1));
    if (spec.family == "pure_product" && key == "kets") {
      spec.kets = val;
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw parameter_error("state family '" + spec.family + "' has no parameter '" + key + "'");
    }
    spec.params[key] = parse_double(val, key);
  }
  return spec;
}

inline StateFamily StateSpec::to_family() const {
  const auto need = [&](const char* key) {
    const auto it = params.find(key);
    if (it == params.end()) throw parameter_error("state family '" + family + "' needs parameter '" + key + "'");
    return it->second;
  };
  const auto optional = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  using namespace families;
  if (family == "singlet") return Singlet{};
  if (family == "werner") return Werner{need("p")};
  if (family == "sigma") return Sigma{};
  if (family == "cg") return Cg{need("theta"), optional("lambda", -1.0)};
  if (family == "classical") return Classical{need("theta"), optional("beta", 0.0)};
  if (family == "transition") return Transition{need("p")};
  if (family == "ghz") return Ghz{};
  if (family == "mixed") return Werner{0.0};  // I/4
  if (family == "pure_product") {
    if (kets.empty()) throw parameter_error("pure_product needs kets=..., e.g. kets=00");
    const double s = 1.0 / std::numbers::sqrt2;
    PureProduct pp;
    for (char c : kets) {
      switch (c) {
        case '0': pp.kets.push_back({1.0, 0.0}); break;
        case '1': pp.kets.push_back({0.0, 1.0}); break;
        case '+': pp.kets.push_back({s, s}); break;
        case '-': pp.kets.push_back({s, -s}); break;
        case 'r': pp.kets.push_back({s, cplx{0.0, s}}); break;
        case 'l': pp.kets.push_back({s, cplx{0.0, -s}}); break;
        default: throw parameter_error(std::string("pure_product: unknown ket symbol '") + c + "'");
      }
    }
    return pp;
  }
  throw parameter_error("unknown state family '" + family + "'");
}

inline std::string StateSpec::to_string() const {
  std::string out = family;
  char sep = ':';
  for (const auto& [k, v] : params) {
    out += sep + k + "=" + format_double(v);
    sep = ',';
  }
  if (!kets.empty()) out += std::string(1, sep) + "kets=" + kets;
  return out;
}

// ---------------------------------------------------------------------------
// Quantities

enum class Quantity {
  s_chsh,
  s_chsh_lpo,
  i3322_tilde,
  c3322,
  i2222_tilde,
  i2222_lpo_tilde,
  horodecki_m,
  bloch_norm_a,
  bloch_norm_b,
  mermin,
  mermin_lpo,
};

inline constexpr std::array<std::pair<Quantity, std::string_view>, 11> kQuantityNames{{
    {Quantity::s_chsh, "s_chsh"},
    {Quantity::s_chsh_lpo, "s_chsh_lpo"},
    {Quantity::i3322_tilde, "i3322_tilde"},
    {Quantity::c3322, "c3322"},
    {Quantity::i2222_tilde, "i2222_tilde"},
    {Quantity::i2222_lpo_tilde, "i2222_lpo_tilde"},
    {Quantity::horodecki_m, "horodecki_m"},
    {Quantity::bloch_norm_a, "bloch_norm_a"},
    {Quantity::bloch_norm_b, "bloch_norm_b"},
    {Quantity::mermin, "mermin"},
    {Quantity::mermin_lpo, "mermin_lpo"},
}};

inline std::string_view to_string(Quantity q) {
  for (const auto& [k, name] : kQuantityNames)
    if (k == q) return name;
  return "?";
}

inline std::optional<Quantity> parse_quantity(std::string_view name) {
  for (const auto& [k, n] : kQuantityNames)
    if (n == name) return k;
  return std::nullopt;
}

/// Settings used by the normalized quantities: optimized over all settings, or
/// the fixed textbook choices (Bell settings for 2+2, Tavakoli settings for 3+3).
enum class SettingsMode { optimized, bell };

inline std::optional<SettingsMode> parse_settings_mode(std::string_view s) {
  if (s == "optimized") return SettingsMode::optimized;
  if (s == "bell") return SettingsMode::bell;
  return std::nullopt;
}

struct QuantityValue {
  double value = 0.0;
  double bound = 0.0;
  std::string bound_name;
  bool converged = true;
  bool is_witness = false;  // LPO witnesses must respect their bound; Bell values may violate it
};

namespace detail {

/// CH-form probabilities with LPO-perceived correlators a_x b_y C_xy in place of C_xy.
inline MarginalMeans lpo_perceived_means(const MarginalMeans& mm) {
  MarginalMeans out = mm;
  for (std::size_t x = 0; x < mm.a.size(); ++x)
    for (std::size_t y = 0; y < mm.b.size(); ++y) out.c[x * mm.b.size() + y] = mm.a[x] * mm.b[y] * mm.corr(x, y);
  return out;
}

}  // namespace detail

inline QuantityValue evaluate_quantity(Quantity q, const DensityMatrix& rho, SettingsMode mode,
                                       const OptimizerConfig& cfg) {
  QuantityValue out;
  switch (q) {
    case Quantity::s_chsh: {
      out.value = horodecki(rho).chsh_max();
      out.bound = 2.0;
      out.bound_name = "lhv";
      return out;
    }
    case Quantity::s_chsh_lpo: {
      if (mode == SettingsMode::bell) {
        out.value = sym_value_fixed(rho, chsh_functional(), bell_settings());
        out.bound = bound_geometry_free(rho, chsh_functional());
      } else {
        const auto rep = sym_sup(rho, chsh_functional(), SettingsConstraint::free, cfg);
        out.value = rep.value;
        out.bound = *rep.bound("geometry_free");
        out.converged = rep.converged;
      }
      out.bound_name = "geometry_free";
      out.is_witness = true;
      return out;
    }
    case Quantity::c3322:
    case Quantity::i3322_tilde: {
      std::optional<MeasurementScenario> settings;
      if (mode == SettingsMode::bell) {
        settings = tavakoli_settings();
      } else {
        const auto rep = bell_sup(rho, c3322_functional(), cfg);
        settings = rep.optimizing_scenario;
        out.converged = rep.converged;
      }
      const auto mm = marginal_means(rho, *settings);
      if (q == Quantity::c3322) {
        out.value = c3322_value(mm);
        out.bound = 4.0;
      } else {
        out.value = normalized_value(NormalizedKind::i3322_tilde, i3322_probability_value(mm));
        out.bound = 1.0;
      }
      out.bound_name = "lhv";
      return out;
    }
    case Quantity::i2222_tilde: {
      // Marginal terms cancel in the CH form, so I2222 = (S - 2) / 4.
      const double raw = mode == SettingsMode::bell ? i2222_probability_value(marginal_means(rho, bell_settings()))
                                                    : (horodecki(rho).chsh_max() - 2.0) / 4.0;
      out.value = normalized_value(NormalizedKind::i2222_tilde, raw);
      out.bound = 1.0;
      out.bound_name = "lhv";
      return out;
    }
    case Quantity::i2222_lpo_tilde: {
      std::optional<MeasurementScenario> settings;
      if (mode == SettingsMode::optimized) {
        const auto rep = sym_sup(rho, chsh_functional(), SettingsConstraint::free, cfg);
        settings = rep.optimizing_scenario;
        out.converged = rep.converged;
      }
      if (!settings) settings = bell_settings();
      const auto mm = detail::lpo_perceived_means(marginal_means(rho, *settings));
      out.value = normalized_value(NormalizedKind::i2222_lpo_tilde, i2222_probability_value(mm));
      out.bound = bound_geometry_free(rho, chsh_functional()) / 2.0;
      out.bound_name = "geometry_free";
      out.is_witness = true;
      return out;
    }
    case Quantity::horodecki_m: {
      out.value = horodecki(rho).m_value;
      out.bound = 1.0;
      out.bound_name = "lhv";
      return out;
    }
    case Quantity::bloch_norm_a:
    case Quantity::bloch_norm_b: {
      out.value = bloch_vector(rho.marginal(q == Quantity::bloch_norm_a ? 0 : 1)).norm();
      out.bound = 1.0;
      out.bound_name = "physical";
      return out;
    }
    case Quantity::mermin: {
      out.value = mermin_value(rho);
      out.bound = 2.0;
      out.bound_name = "lhv";
      return out;
    }
    case Quantity::mermin_lpo: {
      const auto rep = mermin_lpo_witness(rho, mermin_mode::AsymSup{});
      out.value = rep.value;
      out.bound = 2.0;
      out.bound_name = "lhv";
      out.is_witness = true;
      return out;
    }
  }
  throw std::invalid_argument("evaluate_quantity: unknown quantity");
}

}  // namespace lpow
