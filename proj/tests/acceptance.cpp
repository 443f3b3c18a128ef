// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "lpow/sweep.hpp"
#include "support.hpp"

using namespace lpow;
using lpow::test::Rng;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) { return format_double(v); }

int failures = 0;

void criterion(const char* label, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = time_limit_s <= 0 || secs < time_limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", label, o.detail.c_str(), secs,
              in_time ? "" : " (over time limit)");
  std::fflush(stdout);
}

OptimizerConfig restarts(int n, std::uint64_t seed = 20240601) {
  OptimizerConfig c;
  c.restarts = n;
  c.seed = seed;
  return c;
}

DensityMatrix product(std::initializer_list<std::array<cplx, 2>> kets) {
  return make_state(families::PureProduct{kets});
}

/// Linear interpolation of the first grid position where v(p) - level changes sign.
double crossing(const SweepResult& r, std::size_t column, double level) {
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double p0 = r.rows[i - 1].param, p1 = r.rows[i].param;
    const double v0 = r.rows[i - 1].cells[column].value - level, v1 = r.rows[i].cells[column].value - level;
    if ((v0 > 0) != (v1 > 0)) return p0 + v0 * (p1 - p0) / (v0 - v1);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string sweep_csv(const SweepSpec& spec) {
  std::ostringstream os;
  write_csv(os, spec, run_sweep(spec));
  return os.str();
}

}  // namespace

int main() {
  criterion("AC1 singlet CHSH and symmetric witness", 1.0, [] {
    const auto rho = make_state(families::Singlet{});
    const double closed = horodecki(rho).chsh_max();
    const double fixed = std::abs(rho.expectation(bell_operator_matrix(chsh_functional(), bell_settings())));
    const double opt = bell_sup(rho, chsh_functional(), restarts(64)).value;
    const double w = sym_value_fixed(rho, chsh_functional(), bell_settings());
    const double t = 2 * std::sqrt(2.0);
    const bool ok = std::abs(closed - t) < 1e-6 && std::abs(fixed - t) < 1e-6 && std::abs(opt - t) < 1e-6 &&
                    std::abs(w) < 1e-9;
    return Outcome{ok, "S closed=" + fmt(closed) + " fixed=" + fmt(fixed) + " optimized=" + fmt(opt) +
                           " W_sym=" + fmt(w)};
  });

  criterion("AC2 |00> witnesses reach the local bound", 5.0, [] {
    const auto rho = product({{1.0, 0.0}, {1.0, 0.0}});
    const double sym = sym_sup(rho, chsh_functional(), SettingsConstraint::free, restarts(64)).value;
    const double asym = asym_sup(rho, chsh_functional()).value;
    const double lhv = lhv_bound(chsh_functional());
    const bool ok = std::abs(sym - 2.0) < 1e-6 && asym == lhv && lhv == 2.0;
    return Outcome{ok, "S_LPO=" + fmt(sym) + " asym_sup=" + fmt(asym) + " lhv=" + fmt(lhv)};
  });

  criterion("AC3 maximally mixed and Werner witnesses vanish", 30.0, [] {
    double worst = std::abs(sym_sup(make_state(families::Werner{0.0}), chsh_functional(), SettingsConstraint::free,
                                    restarts(64))
                                .value);
    for (int i = 0; i <= 100; ++i) {
      const auto rho = make_state(families::Werner{i / 100.0});
      for (const auto& f : {chsh_functional(), c3322_functional()}) {
        worst = std::max(worst, std::abs(asym_sup(rho, f).value));
        worst = std::max(worst, std::abs(sym_sup(rho, f, SettingsConstraint::free, restarts(64)).value));
        worst = std::max(worst, std::abs(sym_sup(rho, f, SettingsConstraint::orthogonal, restarts(64)).value));
      }
    }
    return Outcome{worst < 1e-9, "max |witness| over 101 Werner points=" + fmt(worst)};
  });

  criterion("AC4 sigma state: C3322 violation without CHSH violation", 0.0, [] {
    const auto rho = make_state(families::Sigma{});
    const double c = c3322_value(rho, tavakoli_settings());
    const double m = std::pow(horodecki(rho).m_value, 2);
    const auto scan = bell_sup(rho, chsh_functional(), restarts(100000));
    const bool ok = std::abs(c - 4.05) <= 0.01 && m < 1.0 && scan.value < 2.0 - 1e-3;
    return Outcome{ok, "C3322=" + fmt(c) + " M=" + fmt(m) + " max S over 1e5 restarts=" + fmt(scan.value)};
  });

  criterion("AC5 GHZ Mermin and LPO Mermin", 1.0, [] {
    const auto ghz = make_state(families::Ghz{});
    const auto zzz = product({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
    const double m = mermin_value(ghz);
    const double wa = mermin_lpo_witness(ghz, mermin_mode::AsymSup{}).value;
    const double ws = mermin_lpo_witness(ghz, mermin_mode::SymFixed{}).value;
    const double w0 = mermin_lpo_witness(zzz, mermin_mode::AsymSup{}).value;
    const bool ok = std::abs(m - 4.0) < 1e-9 && std::abs(wa) < 1e-9 && std::abs(ws) < 1e-9 && std::abs(w0 - 2.0) < 1e-9;
    return Outcome{ok, "GHZ M=" + fmt(m) + " W_asym=" + fmt(wa) + " W_sym=" + fmt(ws) + "; |000> W_asym=" + fmt(w0)};
  });

  criterion("AC6 transition sweep crossings and LPO magnitude", 120.0, [] {
    SweepSpec spec;
    spec.state = StateSpec::parse("transition");
    spec.sweep_param = "p";
    spec.grid = Grid::parse("0:1:101");
    spec.quantities = {Quantity::i2222_tilde, Quantity::i3322_tilde, Quantity::i2222_lpo_tilde};
    spec.optimizer = restarts(32);
    const auto r = run_sweep(spec);
    const double c2 = crossing(r, 0, 1.0), c3 = crossing(r, 1, 1.0);
    double bump = 0.0, at = NAN;
    for (const auto& row : r.rows)
      if (row.param >= 0.1 && row.param < 0.5 && row.cells[2].value > bump) {
        bump = row.cells[2].value;
        at = row.param;
      }
    const bool ok = r.warnings.empty() && std::abs(c2 - 0.30) <= 0.02 && std::abs(c3 - 0.25) <= 0.02 &&
                    std::abs(bump - 0.05) <= 0.03;
    return Outcome{ok, "CHSH crossing p=" + fmt(c2) + " 3322 crossing p=" + fmt(c3) + " max i2222_lpo_tilde on [0.1, 0.5) " + fmt(bump) +
                           " at p=" + fmt(at) + " warnings=" + std::to_string(r.warnings.size())};
  });

  criterion("AC7 property suite", 300.0, [] {
    Rng rng(7);
    const auto chsh = chsh_functional(), c3322 = c3322_functional();
    long checks = 0;
    std::map<std::string, long> bad;
    const auto check = [&](bool ok, const char* what) {
      ++checks;
      if (!ok) ++bad[what];
    };
    for (int t = 0; t < 1000; ++t) {
      const auto rho = test::random_two_qubit(rng);
      const auto bl = bloch_decomposition(rho);
      const auto cb = bound_c3322(rho);
      for (const auto* f : {&chsh, &c3322}) {
        check(asym_sup(rho, *f).value <= lhv_bound(*f) + 1e-9, "asym_sup <= lhv");
      }
      const auto povm = test::random_povm(rng, 4, 2 + static_cast<std::size_t>(rng() % 4));
      for (std::size_t k = 0; k < 2; ++k) {
        ComplexMatrix sum(2, 2);
        for (const auto& e : povm) sum += lpo_project(e, rho, k).matrix;
        check(max_abs_diff(sum, ComplexMatrix::identity(2)) < 1e-10, "POVM sum");
      }
      const auto h = test::random_hermitian(rng, 4);
      check(std::abs(perceived_expectation(h, rho, 0) - perceived_expectation(h, rho, 1)) < 1e-12, "side symmetry");

      for (int k = 0; k < 10; ++k) {
        const auto s2 = test::random_scenario(rng, 2, 2);
        const auto s3 = test::random_scenario(rng, 3, 3);
        const auto o2 = test::random_orthogonal_scenario(rng, 2, 2);
        const auto o3 = test::random_orthogonal_scenario(rng, 3, 3);
        check(asym_value_fixed(rho, chsh, s2) <= 2.0 + 1e-9, "asym fixed <= lhv");
        check(asym_value_fixed(rho, c3322, s3) <= 4.0 + 1e-9, "asym fixed <= lhv");
        check(sym_value_fixed(rho, chsh, s2) <= bound_geometry_free(bl, chsh) + 1e-9, "geometry-free bound");
        check(sym_value_fixed(rho, chsh, o2) <= bound_orthogonal(bl, chsh) + 1e-9, "orthogonal bound");
        const double c3 = sym_value_fixed(rho, c3322, s3), co3 = sym_value_fixed(rho, c3322, o3);
        check(c3 <= cb.geometry_free + 1e-9, "c3322 geometry-free bound");
        check(co3 <= cb.orthogonal + 1e-9, "c3322 orthogonal bound");
        check(std::abs(c3322_value(rho, s3) - 4.0 * (i3322_probability_value(rho, s3) + 1.0)) < 1e-10,
              "C3322 = 4(I3322 + 1)");
        check(std::abs(lpo_correlator(s2.alice[0], s2.bob[1], rho) - lpo_correlator_explicit(s2.alice[0], s2.bob[1], rho)) <
                  1e-10,
              "lpo correlator dual");
      }
    }
    long total_bad = 0;
    std::string detail = std::to_string(checks) + " checks over 1000 states and 40000 settings";
    for (const auto& [what, n] : bad) {
      total_bad += n;
      detail += "; " + what + " violations=" + std::to_string(n);
    }
    if (!total_bad) detail += ", zero violations";
    return Outcome{total_bad == 0, detail};
  });

  criterion("AC8 deterministic sweep CSV", 0.0, [] {
    SweepSpec spec;
    spec.state = StateSpec::parse("classical:beta=0.3");
    spec.sweep_param = "theta";
    spec.grid = Grid::parse("0.1:1.4:9");
    spec.quantities = {Quantity::s_chsh_lpo, Quantity::i3322_tilde, Quantity::i2222_lpo_tilde};
    spec.optimizer = restarts(8, 11);
    spec.bound_columns = true;
    spec.threads = 1;
    const auto a = sweep_csv(spec), b = sweep_csv(spec);
    spec.threads = 4;
    const auto c = sweep_csv(spec);
    return Outcome{a == b && a == c && !a.empty(), std::to_string(a.size()) + " bytes, repeated and 4-thread runs " +
                                                       (a == b && a == c ? "identical" : "differ")};
  });

  criterion("Fig2 CG family: 3322 violated while CHSH pinned at 1", 0.0, [] {
    double min_i3322 = INFINITY, max_dev = 0.0;
    for (int i = 0; i <= 9; ++i) {
      const double theta = 0.05 + 0.05 * i;
      const auto rho = make_state(families::Cg{theta});
      const auto cfg = restarts(32, mix_seed(3, static_cast<std::uint64_t>(i)));
      min_i3322 = std::min(min_i3322, evaluate_quantity(Quantity::i3322_tilde, rho, SettingsMode::optimized, cfg).value);
      max_dev = std::max(
          max_dev, std::abs(evaluate_quantity(Quantity::i2222_tilde, rho, SettingsMode::optimized, cfg).value - 1.0));
    }
    return Outcome{min_i3322 > 1.0 && max_dev < 1e-6,
                   "theta in [0.05, 0.5]: min I3322~=" + fmt(min_i3322) + " max |I2222~ - 1|=" + fmt(max_dev)};
  });

  return failures ? 1 : 0;
}
