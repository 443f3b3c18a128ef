// lpow: reports, sweeps and plots for local-perception witnesses.
//
//   lpow report --state werner:p=0.9 --quantities s_chsh,s_chsh_lpo
//   lpow report --state sigma --functional c3322
//   lpow sweep --state werner --param p --grid 0:1:101 --quantities s_chsh,s_chsh_lpo --out werner.csv
//   lpow sweep --config sweeps.ini
//   lpow plot werner.csv --columns s_chsh,s_chsh_lpo --bound 2 --out werner.svg
//
// Exit codes: 0 success, 2 usage or spec error, 3 I/O error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lpow/config.hpp"
#include "lpow/plot.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct OptimizerFlags {
  std::uint64_t seed = lpow::OptimizerConfig{}.seed;
  int restarts = lpow::OptimizerConfig{}.restarts;
  int max_iterations = lpow::OptimizerConfig{}.max_iterations;
  double step_tolerance = lpow::OptimizerConfig{}.step_tolerance;
  double value_tolerance = lpow::OptimizerConfig{}.value_tolerance;

  void add(CLI::App& app) {
    app.add_option("--seed", seed, "Optimizer seed");
    app.add_option("--restarts", restarts, "Optimizer restarts per evaluation");
    app.add_option("--max-iterations", max_iterations, "Pattern-search iterations per restart");
    app.add_option("--step-tolerance", step_tolerance, "Pattern-search step tolerance");
    app.add_option("--value-tolerance", value_tolerance, "Minimum improvement counted as progress");
  }

  lpow::OptimizerConfig config() const {
    lpow::OptimizerConfig c;
    c.seed = seed;
    c.restarts = restarts;
    c.max_iterations = max_iterations;
    c.step_tolerance = step_tolerance;
    c.value_tolerance = value_tolerance;
    c.validate();
    return c;
  }
};

lpow::SettingsMode settings_mode(const std::string& s) {
  const auto m = lpow::parse_settings_mode(s);
  if (!m) throw lpow::parameter_error("--settings must be 'optimized' or 'bell'");
  return *m;
}

using lpow::format_double;

void print_functional_report(const lpow::DensityMatrix& rho, const lpow::BellFunctional& f,
                             const lpow::OptimizerConfig& cfg) {
  if (rho.factorization() != lpow::Factorization::qubits(2)) {
    throw lpow::parameter_error("--functional needs a two-qubit state");
  }
  std::cout << "functional " << f.name << " m=" << f.m << " n=" << f.n << " lhv=" << format_double(lpow::lhv_bound(f))
            << '\n';
  const auto asym = lpow::asym_sup(rho, f);
  std::cout << "asym_sup value=" << format_double(asym.value) << " bound=" << format_double(*asym.bound("lhv"))
            << " converged=true\n";
  const auto sym = lpow::sym_sup(rho, f, lpow::SettingsConstraint::free, cfg);
  std::cout << "sym_sup_free value=" << format_double(sym.value)
            << " bound=" << format_double(*sym.bound("geometry_free"))
            << " converged=" << (sym.converged ? "true" : "false") << '\n';
  const auto orth = lpow::sym_sup(rho, f, lpow::SettingsConstraint::orthogonal, cfg);
  std::cout << "sym_sup_orthogonal value=" << format_double(orth.value)
            << " bound=" << format_double(*orth.bound("orthogonal"))
            << " geometry_free=" << format_double(*orth.bound("geometry_free"))
            << " converged=" << (orth.converged ? "true" : "false") << '\n';
  const auto bell = lpow::bell_sup(rho, f, cfg);
  std::cout << "bell_sup value=" << format_double(bell.value) << " bound=" << format_double(lpow::lhv_bound(f))
            << " converged=" << (bell.converged ? "true" : "false") << '\n';
}

int run_report(const std::string& state_text, const std::string& quantities, const std::string& functional,
               const std::string& config_path, const std::string& settings, const OptimizerFlags& flags) {
  const auto cfg = flags.config();
  const auto mode = settings_mode(settings);
  const auto spec = lpow::StateSpec::parse(state_text);
  const auto rho = spec.build();
  if (quantities.empty() && functional.empty()) {
    throw lpow::parameter_error("report needs --quantities or --functional");
  }
  std::vector<lpow::Quantity> qs;
  if (!quantities.empty()) {
    qs = lpow::parse_quantity_list(quantities);
    for (auto q : qs) lpow::require_compatible(q, rho);
  }
  std::optional<lpow::BellFunctional> f;
  if (!functional.empty()) {
    f = config_path.empty() ? lpow::preset_functional(functional) : lpow::load_config(config_path).functional(functional);
  }

  std::cout << "state " << spec.to_string() << '\n';
  for (auto q : qs) {
    const auto v = lpow::evaluate_quantity(q, rho, mode, cfg);
    std::cout << lpow::to_string(q) << " value=" << format_double(v.value) << " bound=" << format_double(v.bound)
              << " bound_kind=" << v.bound_name << " converged=" << (v.converged ? "true" : "false");
    if (q == lpow::Quantity::s_chsh) {
      std::cout << " cross_check=" << format_double(lpow::bell_sup(rho, lpow::chsh_functional(), cfg).value);
    }
    std::cout << '\n';
  }
  if (f) print_functional_report(rho, *f, cfg);
  return 0;
}

void emit_sweep(const lpow::SweepSpec& spec) {
  // Open the output first so an unwritable path fails before any computation.
  std::optional<std::ofstream> file;
  if (!spec.output_path.empty()) file = lpow::open_output(spec.output_path);
  const auto result = lpow::run_sweep(spec);
  for (const auto& w : result.warnings) std::cerr << w << '\n';
  if (file) {
    lpow::write_csv(*file, spec, result);
    file->flush();
    if (!*file) throw lpow::io_error("write failed for '" + spec.output_path + "'");
  } else {
    lpow::write_csv(std::cout, spec, result);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-perception witnesses for qubit states"};
  app.require_subcommand(1);

  // report
  auto* report = app.add_subcommand("report", "Evaluate quantities on one state");
  std::string r_state, r_quantities, r_functional, r_config, r_settings = "optimized";
  OptimizerFlags r_flags;
  report->add_option("--state", r_state, "State, e.g. werner:p=0.8 or pure_product:kets=00")->required();
  report->add_option("--quantities", r_quantities, "Comma-separated quantity names");
  report->add_option("--functional", r_functional, "Bell functional preset or config-defined name");
  report->add_option("--config", r_config, "Config file providing functional definitions");
  report->add_option("--settings", r_settings, "optimized or bell");
  r_flags.add(*report);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep one state parameter and write CSV");
  std::string s_state, s_param, s_grid, s_quantities, s_out, s_config, s_section, s_settings = "optimized";
  bool s_bounds = false;
  unsigned s_threads = 0;
  OptimizerFlags s_flags;
  sweep->add_option("--state", s_state, "State family with fixed parameters");
  sweep->add_option("--param", s_param, "Parameter to sweep");
  sweep->add_option("--grid", s_grid, "start:stop:count");
  sweep->add_option("--quantities", s_quantities, "Comma-separated quantity names");
  sweep->add_option("--out", s_out, "Output CSV (default: standard output)");
  sweep->add_option("--config", s_config, "Config file with one section per sweep");
  sweep->add_option("--section", s_section, "Run only this config section");
  sweep->add_option("--settings", s_settings, "optimized or bell");
  sweep->add_flag("--bounds", s_bounds, "Append <quantity>_bound columns");
  sweep->add_option("--threads", s_threads, "Worker threads (0: all cores)");
  s_flags.add(*sweep);

  // plot
  auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  std::string p_csv, p_columns, p_out, p_title;
  std::vector<double> p_bounds;
  plot->add_option("csv", p_csv, "Input CSV")->required();
  plot->add_option("--columns", p_columns, "Comma-separated column names")->required();
  plot->add_option("--out", p_out, "Output SVG")->required();
  plot->add_option("--bound", p_bounds, "Horizontal reference line (repeatable)");
  plot->add_option("--title", p_title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (report->parsed()) {
      return run_report(r_state, r_quantities, r_functional, r_config, r_settings, r_flags);
    }
    if (sweep->parsed()) {
      if (!s_config.empty()) {
        if (!s_state.empty() || !s_param.empty() || !s_grid.empty() || !s_quantities.empty()) {
          throw lpow::parameter_error("--config cannot be combined with --state/--param/--grid/--quantities");
        }
        const auto cfg = lpow::load_config(s_config);
        bool ran = false;
        for (const auto& [name, spec] : cfg.sweeps) {
          if (!s_section.empty() && name != s_section) continue;
          auto s = spec;
          if (!s_out.empty()) s.output_path = s_out;
          if (s_threads) s.threads = s_threads;
          emit_sweep(s);
          ran = true;
        }
        if (!ran) throw lpow::parameter_error("config has no matching sweep section");
        return 0;
      }
      if (s_state.empty() || s_param.empty() || s_grid.empty() || s_quantities.empty()) {
        throw lpow::parameter_error("sweep needs --state, --param, --grid and --quantities (or --config)");
      }
      lpow::SweepSpec spec;
      spec.state = lpow::StateSpec::parse(s_state);
      spec.sweep_param = s_param;
      spec.grid = lpow::Grid::parse(s_grid);
      spec.quantities = lpow::parse_quantity_list(s_quantities);
      spec.optimizer = s_flags.config();
      spec.settings = settings_mode(s_settings);
      spec.bound_columns = s_bounds;
      spec.output_path = s_out;
      spec.threads = s_threads;
      emit_sweep(spec);
      return 0;
    }
    if (plot->parsed()) {
      const auto table = lpow::load_csv(p_csv);
      lpow::PlotSpec ps;
      for (const auto& c : lpow::split(p_columns, ','))
        if (!lpow::trim(c).empty()) ps.columns.push_back(lpow::trim(c));
      ps.bounds = p_bounds;
      ps.title = p_title;
      const auto svg = lpow::render_svg(table, ps);
      auto os = lpow::open_output(p_out);
      os << svg;
      os.flush();
      if (!os) throw lpow::io_error("write failed for '" + p_out + "'");
      return 0;
    }
  } catch (const lpow::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
