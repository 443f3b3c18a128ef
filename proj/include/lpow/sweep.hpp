// sweep.hpp
// Parameter sweeps over a state family, emitted as CSV.

#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "lpow/quantities.hpp"

namespace lpow {

/// Raised when an output file cannot be written or an input file cannot be read.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t count = 2;

  static Grid parse(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw parameter_error("grid must be start:stop:count, got '" + std::string(text) + "'");
    Grid g;
    g.start = parse_double(trim(parts[0]), "grid start");
    g.stop = parse_double(trim(parts[1]), "grid stop");
    const double c = parse_double(trim(parts[2]), "grid count");
    if (c != std::floor(c) || c < 0 || c > 1e7) throw parameter_error("grid count must be a whole number");
    g.count = static_cast<std::size_t>(c);
    g.validate();
    return g;
  }

  void validate() const {
    if (count < 2) throw parameter_error("grid count must be >= 2");
    if (!(start < stop)) throw parameter_error("grid start must be < stop");
  }

  /// Point i; the last point is exactly `stop`.
  double at(std::size_t i) const {
    if (i + 1 == count) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

/// Number of parties a quantity needs, or 0 for any.
inline std::size_t required_parties(Quantity q) {
  switch (q) {
    case Quantity::mermin:
    case Quantity::mermin_lpo: return 3;
    case Quantity::bloch_norm_a:
    case Quantity::bloch_norm_b: return 0;
    default: return 2;
  }
}

inline void require_compatible(Quantity q, const DensityMatrix& rho) {
  const auto need = required_parties(q);
  if (need == 0 && rho.factorization() == Factorization::qubits(rho.parties()) && rho.parties() >= 2) return;
  if (need != 0 && rho.factorization() == Factorization::qubits(need)) return;
  throw parameter_error("quantity '" + std::string(to_string(q)) + "' does not apply to a " +
                        std::to_string(rho.parties()) + "-party state");
}

inline std::vector<Quantity> parse_quantity_list(std::string_view text) {
  std::vector<Quantity> out;
  for (const auto& item : split(text, ',')) {
    const auto name = trim(item);
    if (name.empty()) continue;
    const auto q = parse_quantity(name);
    if (!q) throw parameter_error("unknown quantity '" + name + "'");
    out.push_back(*q);
  }
  if (out.empty()) throw parameter_error("no quantities given");
  return out;
}

struct SweepSpec {
  StateSpec state;
  std::string sweep_param;
  Grid grid;
  std::vector<Quantity> quantities;
  OptimizerConfig optimizer;
  SettingsMode settings = SettingsMode::optimized;
  bool bound_columns = false;
  std::string output_path;  // empty: standard output
  unsigned threads = 0;     // 0: hardware concurrency

  void validate() const {
    grid.validate();
    optimizer.validate();
    if (quantities.empty()) throw parameter_error("sweep needs at least one quantity");
    const auto names = StateSpec::parameter_names(state.family);
    if (std::find(names.begin(), names.end(), sweep_param) == names.end()) {
      throw parameter_error("state family '" + state.family + "' has no parameter '" + sweep_param + "'");
    }
  }
};

struct SweepCell {
  double value = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct SweepRow {
  double param = 0.0;
  std::vector<SweepCell> cells;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

/// Evaluates every grid point. Point i uses seed mix_seed(spec.optimizer.seed, i),
/// so the output does not depend on the thread count or completion order.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n = spec.grid.count;

  // Reject invalid parameters and incompatible quantities before any work.
  for (std::size_t i = 0; i < n; ++i) {
    const auto rho = spec.state.with(spec.sweep_param, spec.grid.at(i)).build();
    if (i == 0)
      for (auto q : spec.quantities) require_compatible(q, rho);
  }

  SweepResult result;
  result.rows.resize(n);
  std::vector<std::vector<std::string>> warnings(n);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      auto& row = result.rows[i];
      row.param = spec.grid.at(i);
      row.cells.resize(spec.quantities.size());
      OptimizerConfig cfg = spec.optimizer;
      cfg.seed = mix_seed(spec.optimizer.seed, i);
      const auto rho = spec.state.with(spec.sweep_param, row.param).build();
      for (std::size_t k = 0; k < spec.quantities.size(); ++k) {
        const auto q = spec.quantities[k];
        const std::string where = std::string(to_string(q)) + " at " + spec.sweep_param + "=" + format_double(row.param);
        try {
          const auto v = evaluate_quantity(q, rho, spec.settings, cfg);
          row.cells[k].bound = v.bound;
          if (v.converged) {
            row.cells[k].value = v.value;
          } else {
            warnings[i].push_back("warning: optimizer did not converge for " + where);
          }
        } catch (const std::exception& e) {
          warnings[i].push_back("warning: " + where + ": " + e.what());
        }
      }
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& w : warnings)
    for (auto& s : w) result.warnings.push_back(std::move(s));
  return result;
}

inline void write_csv(std::ostream& os, const SweepSpec& spec, const SweepResult& result) {
  std::string out = "param";
  for (auto q : spec.quantities) out += "," + std::string(to_string(q));
  if (spec.bound_columns)
    for (auto q : spec.quantities) out += "," + std::string(to_string(q)) + "_bound";
  out += '\n';
  for (const auto& row : result.rows) {
    out += format_double(row.param);
    for (const auto& c : row.cells) out += "," + format_double(c.value);
    if (spec.bound_columns)
      for (const auto& c : row.cells) out += "," + format_double(c.bound);
    out += '\n';
  }
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

/// Opens `path` for binary writing (so line endings stay LF) or throws io_error.
inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot write '" + path + "'");
  return os;
}

}  // namespace lpow
