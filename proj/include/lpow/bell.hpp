// bell.hpp
// Two-party Bell functionals B = sum a_xy A_x(x)B_y + sum b_x A_x(x)I + sum g_y I(x)B_y,
// their deterministic local bounds, and the probability/correlator forms of
// CHSH (CH form) and I3322.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpow/states.hpp"

namespace lpow {

/// Coefficient triple (alpha: m x n, beta: m, gamma: n).
struct BellFunctional {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> alpha;  // row-major m x n
  std::vector<double> beta;
  std::vector<double> gamma;
  std::string name;

  BellFunctional() = default;
  BellFunctional(std::size_t rows, std::size_t cols, std::vector<double> a, std::vector<double> b,
                 std::vector<double> g, std::string label = "custom")
      : m(rows), n(cols), alpha(std::move(a)), beta(std::move(b)), gamma(std::move(g)), name(std::move(label)) {
    if (m == 0 || n == 0) throw std::invalid_argument("BellFunctional: m and n must be >= 1");
    if (alpha.size() != m * n || beta.size() != m || gamma.size() != n) {
      throw dimension_error("BellFunctional: coefficient sizes do not match m x n");
    }
    for (const auto* v : {&alpha, &beta, &gamma})
      for (double c : *v)
        if (!std::isfinite(c)) throw std::invalid_argument("BellFunctional: non-finite coefficient");
  }

  double a(std::size_t x, std::size_t y) const { return alpha[x * n + y]; }
};

struct MeasurementScenario {
  std::vector<QubitObservable> alice;
  std::vector<QubitObservable> bob;
  bool orthogonal = false;

  MeasurementScenario(std::vector<QubitObservable> a, std::vector<QubitObservable> b, bool orth = false)
      : alice(std::move(a)), bob(std::move(b)), orthogonal(orth) {
    if (orthogonal) {
      for (const auto* side : {&alice, &bob})
        for (std::size_t i = 0; i < side->size(); ++i)
          for (std::size_t j = i + 1; j < side->size(); ++j)
            if (std::abs(dot((*side)[i].direction(), (*side)[j].direction())) > 1e-10) {
              throw std::invalid_argument("MeasurementScenario: settings flagged orthogonal are not");
            }
    }
  }
};

/// a_x = Tr(rho_A A_x), b_y = Tr(rho_B B_y), c_xy = Tr(rho A_x (x) B_y).
struct MarginalMeans {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;  // row-major m x n

  double corr(std::size_t x, std::size_t y) const { return c[x * b.size() + y]; }
};

// ---------------------------------------------------------------------------
// Presets

inline BellFunctional chsh_functional() {
  return {2, 2, {1, 1, 1, -1}, {0, 0}, {0, 0}, "chsh"};
}

/// Correlator form of I3322.
inline BellFunctional c3322_functional() {
  return {3, 3, {1, 1, 1, 1, 1, -1, 1, -1, 0}, {1, 1, 0}, {-1, -1, 0}, "c3322"};
}

inline BellFunctional preset_functional(std::string_view name) {
  if (name == "chsh") return chsh_functional();
  if (name == "c3322") return c3322_functional();
  throw std::invalid_argument("unknown Bell functional preset: " + std::string(name));
}

/// A = (sigma_x, sigma_z), B = ((sigma_x + sigma_z)/sqrt2, (sigma_x - sigma_z)/sqrt2).
inline MeasurementScenario bell_settings() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {{QubitObservable({1, 0, 0}), QubitObservable({0, 0, 1})},
          {QubitObservable({s, 0, s}), QubitObservable({s, 0, -s})}};
}

/// O(phi, theta) = sin(theta)(cos(phi) sx + sin(phi) sy) + cos(theta) sz.
inline QubitObservable tavakoli_direction(double phi, double theta) {
  return QubitObservable::from_angles(theta, phi);
}

/// Three-setting scenario with cos(eta) = sqrt(7/8), cos(zeta) = sqrt(2/3), all
/// directions in the x-z plane: A = O(0, eta), O(0, -eta), O(0, -pi/2) and
/// B = O(0, -zeta), O(0, zeta), O(0, pi/2).
inline MeasurementScenario tavakoli_settings() {
  const double eta = std::acos(std::sqrt(7.0 / 8.0));
  const double zeta = std::acos(std::sqrt(2.0 / 3.0));
  const double half_pi = std::numbers::pi / 2.0;
  return {{tavakoli_direction(0.0, eta), tavakoli_direction(0.0, -eta), tavakoli_direction(0.0, -half_pi)},
          {tavakoli_direction(0.0, -zeta), tavakoli_direction(0.0, zeta), tavakoli_direction(0.0, half_pi)}};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {
inline void require_scenario(const BellFunctional& f, const MeasurementScenario& s, const char* what) {
  if (s.alice.size() != f.m || s.bob.size() != f.n) {
    throw dimension_error(std::string(what) + ": scenario has " + std::to_string(s.alice.size()) + "+" +
                          std::to_string(s.bob.size()) + " settings, functional expects " +
                          std::to_string(f.m) + "+" + std::to_string(f.n));
  }
}
inline void require_two_qubits(const DensityMatrix& rho, const char* what) {
  if (rho.factorization() != Factorization::qubits(2)) {
    throw dimension_error(std::string(what) + ": expected a two-qubit state");
  }
}
}  // namespace detail

inline ComplexMatrix bell_operator_matrix(const BellFunctional& f, const MeasurementScenario& s) {
  detail::require_scenario(f, s, "bell_operator_matrix");
  const auto id = ComplexMatrix::identity(2);
  ComplexMatrix out(4, 4);
  for (std::size_t x = 0; x < f.m; ++x) {
    const auto ax = s.alice[x].matrix();
    for (std::size_t y = 0; y < f.n; ++y)
      if (f.a(x, y) != 0.0) out += f.a(x, y) * kron(ax, s.bob[y].matrix());
    if (f.beta[x] != 0.0) out += f.beta[x] * kron(ax, id);
  }
  for (std::size_t y = 0; y < f.n; ++y)
    if (f.gamma[y] != 0.0) out += f.gamma[y] * kron(id, s.bob[y].matrix());
  return out;
}

/// Means through explicit operator traces.
inline MarginalMeans marginal_means(const DensityMatrix& rho, const MeasurementScenario& s) {
  detail::require_two_qubits(rho, "marginal_means");
  const auto rho_a = rho.marginal(0);
  const auto rho_b = rho.marginal(1);
  MarginalMeans mm;
  for (const auto& o : s.alice) mm.a.push_back(rho_a.expectation(o.matrix()));
  for (const auto& o : s.bob) mm.b.push_back(rho_b.expectation(o.matrix()));
  for (const auto& oa : s.alice)
    for (const auto& ob : s.bob) mm.c.push_back(rho.expectation(kron(oa.matrix(), ob.matrix())));
  return mm;
}

/// Means from the Bloch decomposition: a_x = r_A.a_x, b_y = r_B.b_y, c_xy = a_x^T T b_y.
inline MarginalMeans marginal_means(const TwoQubitBloch& bl, const MeasurementScenario& s) {
  MarginalMeans mm;
  for (const auto& o : s.alice) mm.a.push_back(dot(bl.a.r, o.direction()));
  for (const auto& o : s.bob) mm.b.push_back(dot(bl.b.r, o.direction()));
  for (const auto& oa : s.alice)
    for (const auto& ob : s.bob) mm.c.push_back(bl.t.sandwich(oa.direction(), ob.direction()));
  return mm;
}

/// F(a, b) = a^T alpha b + beta^T a + gamma^T b.
inline double bilinear_value(const BellFunctional& f, std::span<const double> a, std::span<const double> b) {
  if (a.size() != f.m || b.size() != f.n) throw dimension_error("bilinear_value: mean vector sizes");
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    double row = f.beta[x];
    for (std::size_t y = 0; y < f.n; ++y) row += f.a(x, y) * b[y];
    v += row * a[x];
  }
  for (std::size_t y = 0; y < f.n; ++y) v += f.gamma[y] * b[y];
  return v;
}

/// Tr(rho B) = sum alpha c + beta.a + gamma.b.
inline double bell_value(const BellFunctional& f, const MarginalMeans& mm) {
  if (mm.a.size() != f.m || mm.b.size() != f.n) throw dimension_error("bell_value: mean table sizes");
  double v = 0.0;
  for (std::size_t x = 0; x < f.m; ++x) {
    for (std::size_t y = 0; y < f.n; ++y) v += f.a(x, y) * mm.corr(x, y);
    v += f.beta[x] * mm.a[x];
  }
  for (std::size_t y = 0; y < f.n; ++y) v += f.gamma[y] * mm.b[y];
  return v;
}

struct HypercubeVertex {
  double value = 0.0;
  std::vector<double> a;
  std::vector<double> b;
};

inline constexpr std::size_t kMaxEnumeratedSettings = 24;

/// Maximum of F over the scaled box vertices {+-scale_a}^m x {+-scale_b}^n.
/// Vertices are visited in lexicographic order of (a, b) with -1 before +1;
/// the first maximal vertex wins ties.
inline HypercubeVertex hypercube_max(const BellFunctional& f, double scale_a = 1.0, double scale_b = 1.0) {
  const std::size_t k = f.m + f.n;
  if (k > kMaxEnumeratedSettings) {
    throw std::invalid_argument("hypercube_max: m+n = " + std::to_string(k) + " exceeds enumeration limit");
  }
  HypercubeVertex best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> a(f.m), b(f.n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    // Coordinate 0 is the most significant bit; a clear bit means -1.
    for (std::size_t i = 0; i < k; ++i) {
      const bool plus = (mask >> (k - 1 - i)) & 1U;
      if (i < f.m) {
        a[i] = plus ? scale_a : -scale_a;
      } else {
        b[i - f.m] = plus ? scale_b : -scale_b;
      }
    }
    const double v = bilinear_value(f, a, b);
    if (v > best.value) {
      best.value = v;
      best.a = a;
      best.b = b;
    }
  }
  return best;
}

/// Deterministic local-hidden-variable bound: max of F over {+-1}^{m+n}.
inline double lhv_bound(const BellFunctional& f) { return hypercube_max(f).value; }

struct JointProbability {
  double value = 0.0;
  bool physical = true;  // false when value leaves [0, 1] by more than 1e-10
};

namespace detail {
inline void require_correlator(double c, const char* what) {
  if (!(std::abs(c) <= 1.0 + 1e-10)) throw std::invalid_argument(std::string(what) + " outside [-1, 1]");
}
inline double sign_of_outcome(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("outcome must be 0 or 1");
  return bit == 0 ? 1.0 : -1.0;
}
}  // namespace detail

/// P(a, b | A, B) = (1 + (-1)^a C_AI + (-1)^b C_IB + (-1)^(a+b) C_AB) / 4.
inline JointProbability cond_joint_prob(int a_out, int b_out, double c_ai, double c_ib, double c_ab) {
  detail::require_correlator(c_ai, "C_AI");
  detail::require_correlator(c_ib, "C_IB");
  detail::require_correlator(c_ab, "C_AB");
  const double sa = detail::sign_of_outcome(a_out);
  const double sb = detail::sign_of_outcome(b_out);
  JointProbability p;
  p.value = 0.25 * (1.0 + sa * c_ai + sb * c_ib + sa * sb * c_ab);
  p.physical = p.value >= -1e-10 && p.value <= 1.0 + 1e-10;
  return p;
}

/// P(a | A) = (1 + (-1)^a C_A) / 2.
inline double cond_marginal_prob(int out, double c) {
  detail::require_correlator(c, "marginal correlator");
  return 0.5 * (1.0 + detail::sign_of_outcome(out) * c);
}

namespace detail {
inline void require_settings(const MarginalMeans& mm, std::size_t m, std::size_t n, const char* what) {
  if (mm.a.size() != m || mm.b.size() != n) {
    throw dimension_error(std::string(what) + ": needs " + std::to_string(m) + "+" + std::to_string(n) +
                          " settings");
  }
}
inline double p00(const MarginalMeans& mm, std::size_t x, std::size_t y) {
  return cond_joint_prob(0, 0, mm.a[x], mm.b[y], mm.corr(x, y)).value;
}
}  // namespace detail

/// Probability form of I3322 (local bound 0), outcome-0 probabilities only.
inline double i3322_probability_value(const MarginalMeans& mm) {
  detail::require_settings(mm, 3, 3, "i3322_probability_value");
  using detail::p00;
  return p00(mm, 0, 0) + p00(mm, 0, 1) + p00(mm, 0, 2) + p00(mm, 1, 0) + p00(mm, 1, 1) - p00(mm, 1, 2) +
         p00(mm, 2, 0) - p00(mm, 2, 1) - cond_marginal_prob(0, mm.a[0]) - 2.0 * cond_marginal_prob(0, mm.b[0]) -
         cond_marginal_prob(0, mm.b[1]);
}

inline double i3322_probability_value(const DensityMatrix& rho, const MeasurementScenario& s) {
  return i3322_probability_value(marginal_means(rho, s));
}

/// Correlator form C3322 (local bound 4).
inline double c3322_value(const MarginalMeans& mm) {
  detail::require_settings(mm, 3, 3, "c3322_value");
  const auto c = [&](std::size_t x, std::size_t y) { return mm.corr(x, y); };
  return c(0, 0) + c(0, 1) + c(0, 2) + c(1, 0) + c(1, 1) - c(1, 2) + c(2, 0) - c(2, 1) + mm.a[0] + mm.a[1] -
         mm.b[0] - mm.b[1];
}

inline double c3322_value(const DensityMatrix& rho, const MeasurementScenario& s) {
  return c3322_value(marginal_means(rho, s));
}

/// CH form of CHSH (local bound 0):
/// P(A1B1) + P(A1B2) + P(A2B1) - P(A2B2) - P(A1) - P(B1) = (S - 2) / 4.
inline double i2222_probability_value(const MarginalMeans& mm) {
  detail::require_settings(mm, 2, 2, "i2222_probability_value");
  using detail::p00;
  return p00(mm, 0, 0) + p00(mm, 0, 1) + p00(mm, 1, 0) - p00(mm, 1, 1) - cond_marginal_prob(0, mm.a[0]) -
         cond_marginal_prob(0, mm.b[0]);
}

enum class NormalizedKind { i3322_tilde, i2222_tilde, i2222_lpo_tilde };

/// Affine rescaling that puts the local bound of each inequality at 1.
inline double normalized_value(NormalizedKind kind, double raw) {
  switch (kind) {
    case NormalizedKind::i3322_tilde: return raw + 1.0;
    case NormalizedKind::i2222_tilde:
    case NormalizedKind::i2222_lpo_tilde: return 2.0 * raw + 1.0;
  }
  throw std::invalid_argument("normalized_value: unknown kind");
}

}  // namespace lpow
