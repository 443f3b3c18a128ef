// witness.hpp
// Asymmetric and symmetric LPO witnesses, their settings optimization, the
// state-dependent upper bounds, and the tripartite Mermin variants.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpow/bell.hpp"
#include "lpow/lpo.hpp"
#include "lpow/optimize.hpp"

namespace lpow {

struct WitnessReport {
  double value = 0.0;
  std::optional<MeasurementScenario> optimizing_scenario;
  std::vector<std::pair<std::string, double>> bounds;
  int restarts_used = 0;
  bool converged = true;

  std::optional<double> bound(std::string_view name) const {
    for (const auto& [n, v] : bounds)
      if (n == name) return v;
    return std::nullopt;
  }
};

enum class SettingsConstraint { free, orthogonal };

// ---------------------------------------------------------------------------
// Settings parameterizations

namespace detail {

inline Vec3 spherical(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
}

/// Columns of Rz(a) Ry(b) Rz(c): a rotated orthonormal frame.
inline std::array<Vec3, 3> rotated_frame(double a, double b, double c) {
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  // Row-major rotation matrix.
  const double r[3][3] = {
      {ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb},
      {sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb},
      {-sb * cc, sb * sc, cb},
  };
  std::array<Vec3, 3> frame;
  for (std::size_t k = 0; k < 3; ++k) frame[k] = {r[0][k], r[1][k], r[2][k]};
  return frame;
}

/// Decodes an angle vector into per-party unit directions.
class SettingsDecoder {
 public:
  SettingsDecoder(std::size_t m, std::size_t n, SettingsConstraint c) : m_(m), n_(n), constraint_(c) {
    if (c == SettingsConstraint::orthogonal && (m > 3 || n > 3)) {
      throw std::invalid_argument("orthogonal settings need at most 3 directions per party");
    }
    alice_.resize(m);
    bob_.resize(n);
  }

  std::size_t dimension() const { return constraint_ == SettingsConstraint::free ? 2 * (m_ + n_) : 6; }

  void decode(std::span<const double> x) {
    if (constraint_ == SettingsConstraint::free) {
      for (std::size_t k = 0; k < m_; ++k) alice_[k] = spherical(x[2 * k], x[2 * k + 1]);
      for (std::size_t k = 0; k < n_; ++k) bob_[k] = spherical(x[2 * (m_ + k)], x[2 * (m_ + k) + 1]);
    } else {
      const auto fa = rotated_frame(x[0], x[1], x[2]);
      const auto fb = rotated_frame(x[3], x[4], x[5]);
      std::copy_n(fa.begin(), m_, alice_.begin());
      std::copy_n(fb.begin(), n_, bob_.begin());
    }
  }

  const std::vector<Vec3>& alice() const { return alice_; }
  const std::vector<Vec3>& bob() const { return bob_; }

  MeasurementScenario scenario() const {
    std::vector<QubitObservable> a, b;
    for (const auto& d : alice_) a.push_back(QubitObservable::along(d));
    for (const auto& d : bob_) b.push_back(QubitObservable::along(d));
    return {std::move(a), std::move(b), constraint_ == SettingsConstraint::orthogonal};
  }

 private:
  std::size_t m_, n_;
  SettingsConstraint constraint_;
  std::vector<Vec3> alice_, bob_;
};

/// Symmetric witness integrand from Bloch data and raw directions.
inline double sym_value_bloch(const BellFunctional& f, const TwoQubitBloch& bl, std::span<const Vec3> alice,
                              std::span<const Vec3> bob) {
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    const double ax = dot(bl.a.r, alice[x]);
    for (std::size_t y = 0; y < f.n; ++y) {
      if (f.a(x, y) == 0.0) continue;
      v += f.a(x, y) * ax * dot(bl.b.r, bob[y]) * bl.t.sandwich(alice[x], bob[y]);
    }
    v += f.beta[x] * ax * ax;
  }
  for (std::size_t y = 0; y < f.n; ++y) {
    const double by = dot(bl.b.r, bob[y]);
    v += f.gamma[y] * by * by;
  }
  return v;
}

/// Tr(rho B) from Bloch data and raw directions.
inline double bell_value_bloch(const BellFunctional& f, const TwoQubitBloch& bl, std::span<const Vec3> alice,
                               std::span<const Vec3> bob) {
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    for (std::size_t y = 0; y < f.n; ++y)
      if (f.a(x, y) != 0.0) v += f.a(x, y) * bl.t.sandwich(alice[x], bob[y]);
    v += f.beta[x] * dot(bl.a.r, alice[x]);
  }
  for (std::size_t y = 0; y < f.n; ++y) v += f.gamma[y] * dot(bl.b.r, bob[y]);
  return v;
}

inline double asym_value_bloch(const BellFunctional& f, const TwoQubitBloch& bl, std::span<const Vec3> alice,
                               std::span<const Vec3> bob) {
  std::vector<double> a(f.m), b(f.n);
  for (std::size_t x = 0; x < f.m; ++x) a[x] = dot(bl.a.r, alice[x]);
  for (std::size_t y = 0; y < f.n; ++y) b[y] = dot(bl.b.r, bob[y]);
  return bilinear_value(f, a, b);
}

/// Some unit vector orthogonal to v (or +x when v vanishes).
inline Vec3 perpendicular(const Vec3& v) {
  const Vec3 trial = std::abs(v[0]) < 0.9 * norm(v) || norm(v) == 0.0 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const double nv2 = dot(v, v);
  if (nv2 == 0.0) return trial;
  const double k = dot(trial, v) / nv2;
  Vec3 p{trial[0] - k * v[0], trial[1] - k * v[1], trial[2] - k * v[2]};
  const double np = norm(p);
  return {p[0] / np, p[1] / np, p[2] / np};
}

template <class Evaluate>
OptimizationResult optimize_settings(const OptimizerConfig& cfg, SettingsDecoder& dec, Evaluate eval) {
  auto objective = [&](const std::vector<double>& x) {
    dec.decode(x);
    return eval(dec.alice(), dec.bob());
  };
  return maximize(objective, dec.dimension(), cfg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bounds

inline double bound_geometry_free(const TwoQubitBloch& bl, const BellFunctional& f) {
  const double ra = bl.a.norm(), rb = bl.b.norm();
  double sum_alpha = 0.0, sum_beta = 0.0, sum_gamma = 0.0;
  for (double c : f.alpha) sum_alpha += std::abs(c);
  for (double c : f.beta) sum_beta += std::max(c, 0.0);
  for (double c : f.gamma) sum_gamma += std::max(c, 0.0);
  return ra * rb * sum_alpha + ra * ra * sum_beta + rb * rb * sum_gamma;
}

inline double bound_geometry_free(const DensityMatrix& rho, const BellFunctional& f) {
  detail::require_two_qubits(rho, "bound_geometry_free");
  return bound_geometry_free(bloch_decomposition(rho), f);
}

/// Spectral norm of the entrywise absolute coefficient matrix |alpha|.
inline double abs_alpha_spectral_norm(const BellFunctional& f) {
  ComplexMatrix m(f.m, f.n);
  for (std::size_t x = 0; x < f.m; ++x)
    for (std::size_t y = 0; y < f.n; ++y) m(x, y) = std::abs(f.a(x, y));
  return spectral_norm(m);
}

inline double bound_orthogonal(const TwoQubitBloch& bl, const BellFunctional& f) {
  const double ra = bl.a.norm(), rb = bl.b.norm();
  const double beta_plus = std::max(0.0, *std::max_element(f.beta.begin(), f.beta.end()));
  const double gamma_plus = std::max(0.0, *std::max_element(f.gamma.begin(), f.gamma.end()));
  return abs_alpha_spectral_norm(f) * ra * rb + beta_plus * ra * ra + gamma_plus * rb * rb;
}

inline double bound_orthogonal(const DensityMatrix& rho, const BellFunctional& f) {
  detail::require_two_qubits(rho, "bound_orthogonal");
  return bound_orthogonal(bloch_decomposition(rho), f);
}

/// Both bounds specialized to C3322:
/// free 8|r_A||r_B| + 2|r_A|^2, orthogonal (1 + sqrt3)|r_A||r_B| + |r_A|^2.
struct C3322Bounds {
  double geometry_free = 0.0;
  double orthogonal = 0.0;
};

inline C3322Bounds bound_c3322(const DensityMatrix& rho) {
  detail::require_two_qubits(rho, "bound_c3322");
  const auto bl = bloch_decomposition(rho);
  const auto f = c3322_functional();
  return {bound_geometry_free(bl, f), bound_orthogonal(bl, f)};
}

// ---------------------------------------------------------------------------
// Asymmetric witness

/// Tr[(rho_A (x) rho_B) B(s)].
inline double asym_value_fixed(const DensityMatrix& rho, const BellFunctional& f, const MeasurementScenario& s) {
  detail::require_two_qubits(rho, "asym_value_fixed");
  const auto product = tensor(rho.marginal(0), rho.marginal(1));
  return product.expectation(bell_operator_matrix(f, s));
}

/// Closed form: with free settings every a_x = r_A.a_x sweeps [-|r_A|, |r_A|]
/// independently, so the supremum is the best vertex of the scaled box.
inline WitnessReport asym_sup(const DensityMatrix& rho, const BellFunctional& f) {
  detail::require_two_qubits(rho, "asym_sup");
  const auto bl = bloch_decomposition(rho);
  const double ra = bl.a.norm(), rb = bl.b.norm();
  const auto vertex = hypercube_max(f, ra, rb);

  const auto unit = [](const Vec3& r) {
    const double n = norm(r);
    return n < 1e-12 ? Vec3{0, 0, 1} : Vec3{r[0] / n, r[1] / n, r[2] / n};
  };
  const Vec3 ua = unit(bl.a.r), ub = unit(bl.b.r);
  std::vector<QubitObservable> alice, bob;
  for (double v : vertex.a) alice.push_back(QubitObservable(v < 0 ? Vec3{-ua[0], -ua[1], -ua[2]} : ua));
  for (double v : vertex.b) bob.push_back(QubitObservable(v < 0 ? Vec3{-ub[0], -ub[1], -ub[2]} : ub));

  WitnessReport rep;
  rep.value = vertex.value;
  rep.optimizing_scenario.emplace(std::move(alice), std::move(bob));
  rep.bounds.emplace_back("lhv", lhv_bound(f));
  return rep;
}

/// Numeric settings optimization of the asymmetric witness; cross-check for asym_sup.
inline WitnessReport asym_sup_numeric(const DensityMatrix& rho, const BellFunctional& f,
                                      const OptimizerConfig& cfg) {
  detail::require_two_qubits(rho, "asym_sup_numeric");
  const auto bl = bloch_decomposition(rho);
  detail::SettingsDecoder dec(f.m, f.n, SettingsConstraint::free);
  const auto res = detail::optimize_settings(
      cfg, dec, [&](const auto& a, const auto& b) { return detail::asym_value_bloch(f, bl, a, b); });
  dec.decode(res.x);
  WitnessReport rep;
  rep.value = res.value;
  rep.optimizing_scenario = dec.scenario();
  rep.bounds.emplace_back("lhv", lhv_bound(f));
  rep.restarts_used = res.restarts_used;
  rep.converged = res.converged;
  return rep;
}

// ---------------------------------------------------------------------------
// Symmetric witness

/// sum alpha_xy a_x b_y C_xy + sum beta_x a_x^2 + sum gamma_y b_y^2.
inline double sym_value_fixed(const DensityMatrix& rho, const BellFunctional& f, const MeasurementScenario& s) {
  detail::require_scenario(f, s, "sym_value_fixed");
  const auto mm = marginal_means(rho, s);
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    for (std::size_t y = 0; y < f.n; ++y) v += f.a(x, y) * mm.a[x] * mm.b[y] * mm.corr(x, y);
    v += f.beta[x] * mm.a[x] * mm.a[x];
  }
  for (std::size_t y = 0; y < f.n; ++y) v += f.gamma[y] * mm.b[y] * mm.b[y];
  return v;
}

/// The same value assembled from LPO matrices, one Bell term X at a time:
/// sum_k coeff_k Tr[rho (X_k)^A_rho (x) (X_k)^B_rho].
inline double sym_value_operator(const DensityMatrix& rho, const BellFunctional& f,
                                 const MeasurementScenario& s) {
  detail::require_scenario(f, s, "sym_value_operator");
  detail::require_two_qubits(rho, "sym_value_operator");
  const auto id = ComplexMatrix::identity(2);
  const auto perceived = [&](const ComplexMatrix& x) {
    return rho.expectation(kron(lpo_project(x, rho, 0).matrix, lpo_project(x, rho, 1).matrix));
  };
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    const auto ax = s.alice[x].matrix();
    for (std::size_t y = 0; y < f.n; ++y)
      if (f.a(x, y) != 0.0) v += f.a(x, y) * perceived(kron(ax, s.bob[y].matrix()));
    if (f.beta[x] != 0.0) v += f.beta[x] * perceived(kron(ax, id));
  }
  for (std::size_t y = 0; y < f.n; ++y)
    if (f.gamma[y] != 0.0) v += f.gamma[y] * perceived(kron(id, s.bob[y].matrix()));
  return v;
}

inline WitnessReport sym_sup(const DensityMatrix& rho, const BellFunctional& f, SettingsConstraint constraint,
                             const OptimizerConfig& cfg) {
  detail::require_two_qubits(rho, "sym_sup");
  const auto bl = bloch_decomposition(rho);
  WitnessReport rep;
  rep.bounds.emplace_back("geometry_free", bound_geometry_free(bl, f));
  if (constraint == SettingsConstraint::orthogonal) rep.bounds.emplace_back("orthogonal", bound_orthogonal(bl, f));

  detail::SettingsDecoder dec(f.m, f.n, constraint);

  // Every term carries a factor |r_A| or |r_B| that vanishes: nothing to optimize.
  if (rep.bounds.front().second < 1e-12) {
    rep.value = 0.0;
    rep.converged = true;
    return rep;
  }

  const auto res = detail::optimize_settings(
      cfg, dec, [&](const auto& a, const auto& b) { return detail::sym_value_bloch(f, bl, a, b); });
  dec.decode(res.x);
  rep.value = res.value;
  rep.optimizing_scenario = dec.scenario();
  rep.restarts_used = res.restarts_used;
  rep.converged = res.converged;

  // Settings orthogonal to both Bloch vectors give exactly 0 (possible for free
  // settings, and for orthogonal pairs).
  const bool zero_reachable = constraint == SettingsConstraint::free || (f.m <= 2 && f.n <= 2);
  if (zero_reachable && rep.value < 0.0) {
    const Vec3 pa = detail::perpendicular(bl.a.r);
    const Vec3 pb = detail::perpendicular(bl.b.r);
    std::vector<QubitObservable> alice, bob;
    if (constraint == SettingsConstraint::free) {
      alice.assign(f.m, QubitObservable(pa));
      bob.assign(f.n, QubitObservable(pb));
    } else {
      const auto cross = [](const Vec3& u, const Vec3& v) {
        return Vec3{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
      };
      const auto in_plane = [&](const Vec3& r, const Vec3& p) {
        return norm(r) < 1e-12 ? detail::perpendicular(p) : QubitObservable::along(cross(r, p)).direction();
      };
      alice = {QubitObservable(pa), QubitObservable(in_plane(bl.a.r, pa))};
      bob = {QubitObservable(pb), QubitObservable(in_plane(bl.b.r, pb))};
      alice.resize(f.m, alice.front());
      bob.resize(f.n, bob.front());
    }
    rep.value = 0.0;
    rep.optimizing_scenario.emplace(std::move(alice), std::move(bob),
                                    constraint == SettingsConstraint::orthogonal);
  }

  for (const auto& [name, b] : rep.bounds) {
    if (rep.value > b + 1e-8) {
      throw std::logic_error("sym_sup: value " + std::to_string(rep.value) + " exceeds " + name + " bound " +
                             std::to_string(b));
    }
  }
  return rep;
}

/// Numeric sup over free settings of Tr(rho B): the ordinary Bell value.
inline WitnessReport bell_sup(const DensityMatrix& rho, const BellFunctional& f, const OptimizerConfig& cfg) {
  detail::require_two_qubits(rho, "bell_sup");
  const auto bl = bloch_decomposition(rho);
  detail::SettingsDecoder dec(f.m, f.n, SettingsConstraint::free);
  const auto res = detail::optimize_settings(
      cfg, dec, [&](const auto& a, const auto& b) { return detail::bell_value_bloch(f, bl, a, b); });
  dec.decode(res.x);
  WitnessReport rep;
  rep.value = res.value;
  rep.optimizing_scenario = dec.scenario();
  rep.bounds.emplace_back("lhv", lhv_bound(f));
  rep.restarts_used = res.restarts_used;
  rep.converged = res.converged;
  return rep;
}

// ---------------------------------------------------------------------------
// Tripartite Mermin

/// Two settings (x-like, y-like) for each of three parties.
using MerminSettings = std::array<std::array<QubitObservable, 2>, 3>;

inline MerminSettings mermin_settings() {
  const QubitObservable sx({1, 0, 0}), sy({0, 1, 0});
  return {{{sx, sy}, {sx, sy}, {sx, sy}}};
}

namespace detail {

struct MerminTerm {
  double sign;
  std::array<int, 3> setting;  // 0 = first setting, 1 = second
};

/// X_xxx - X_xyy - X_yxy - X_yyx.
inline constexpr std::array<MerminTerm, 4> kMerminTerms{{
    {+1.0, {0, 0, 0}},
    {-1.0, {0, 1, 1}},
    {-1.0, {1, 0, 1}},
    {-1.0, {1, 1, 0}},
}};

inline void require_three_qubits(const DensityMatrix& rho, const char* what) {
  if (rho.factorization() != Factorization::qubits(3)) {
    throw dimension_error(std::string(what) + ": expected a three-qubit state");
  }
}

inline double mermin_form(std::span<const double, 2> a, std::span<const double, 2> b,
                          std::span<const double, 2> c) {
  double v = 0.0;
  for (const auto& t : kMerminTerms) v += t.sign * a[t.setting[0]] * b[t.setting[1]] * c[t.setting[2]];
  return v;
}

}  // namespace detail

inline ComplexMatrix mermin_operator(const MerminSettings& s) {
  ComplexMatrix out(8, 8);
  for (const auto& t : detail::kMerminTerms) {
    const std::array<ComplexMatrix, 3> f{s[0][t.setting[0]].matrix(), s[1][t.setting[1]].matrix(),
                                         s[2][t.setting[2]].matrix()};
    out += t.sign * kron_all(f);
  }
  return out;
}

inline double mermin_value(const DensityMatrix& rho, const MerminSettings& s = mermin_settings()) {
  detail::require_three_qubits(rho, "mermin_value");
  return rho.expectation(mermin_operator(s));
}

namespace mermin_mode {
struct AsymSup {};
struct SymFixed {
  MerminSettings settings = mermin_settings();
};
}  // namespace mermin_mode

using MerminMode = std::variant<mermin_mode::AsymSup, mermin_mode::SymFixed>;

/// AsymSup: sup of the Mermin trilinear form over per-party mean boxes
/// [-|r_J|, |r_J|]^2 (attained at a vertex). SymFixed: sum_k sign_k a b c C_k
/// at the given settings, C_k the three-body correlator of term k.
inline WitnessReport mermin_lpo_witness(const DensityMatrix& rho, const MerminMode& mode) {
  detail::require_three_qubits(rho, "mermin_lpo_witness");
  std::array<DensityMatrix, 3> marg{rho.marginal(0), rho.marginal(1), rho.marginal(2)};
  WitnessReport rep;
  rep.bounds.emplace_back("lhv", 2.0);

  if (std::holds_alternative<mermin_mode::AsymSup>(mode)) {
    std::array<double, 3> r{};
    for (std::size_t p = 0; p < 3; ++p) r[p] = bloch_vector(marg[p]).norm();
    double best = -std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < 64; ++mask) {
      std::array<std::array<double, 2>, 3> m{};
      for (std::size_t i = 0; i < 6; ++i) m[i / 2][i % 2] = ((mask >> (5 - i)) & 1U) ? r[i / 2] : -r[i / 2];
      best = std::max(best, detail::mermin_form(m[0], m[1], m[2]));
    }
    rep.value = best;
    return rep;
  }

  const auto& s = std::get<mermin_mode::SymFixed>(mode).settings;
  std::array<std::array<double, 2>, 3> means{};
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t k = 0; k < 2; ++k) means[p][k] = marg[p].expectation(s[p][k].matrix());
  double v = 0.0;
  for (const auto& t : detail::kMerminTerms) {
    const std::array<ComplexMatrix, 3> f{s[0][t.setting[0]].matrix(), s[1][t.setting[1]].matrix(),
                                         s[2][t.setting[2]].matrix()};
    const double corr = rho.expectation(kron_all(f));
    v += t.sign * means[0][t.setting[0]] * means[1][t.setting[1]] * means[2][t.setting[2]] * corr;
  }
  rep.value = v;
  return rep;
}

}  // namespace lpow
