// states.hpp
// Density matrices, the state families used throughout the library, and
// Bloch-level descriptors (marginals, Bloch vectors, correlation matrix,
// Horodecki criterion).

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpow/tensor.hpp"

namespace lpow {

/// Raised for state parameters outside their admissible range.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Hermitian, unit-trace, positive semidefinite matrix over a factorization.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix m, Factorization f) : matrix_(std::move(m)), factorization_(std::move(f)) {
    if (!matrix_.is_square() || matrix_.rows() != factorization_.total()) {
      throw dimension_error("DensityMatrix: matrix " + matrix_.shape() + " does not match factorization");
    }
    if (!is_hermitian(matrix_)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    const cplx tr = matrix_.trace();
    if (std::abs(tr - cplx{1.0, 0.0}) > kHermitianTol) {
      throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    }
    if (hermitian_eigenvalues(matrix_).front() < kPsdFloor) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const Factorization& factorization() const { return factorization_; }
  std::size_t parties() const { return factorization_.parties(); }
  std::size_t dim() const { return matrix_.rows(); }

  /// Reduced state on the listed subsystems.
  DensityMatrix marginal(std::span<const std::size_t> keep) const {
    std::vector<std::size_t> dims;
    for (auto k : keep) {
      if (k >= parties()) throw dimension_error("marginal: subsystem index out of range");
      dims.push_back(factorization_.dims[k]);
    }
    return {partial_trace(matrix_, factorization_, keep), Factorization(std::move(dims))};
  }
  DensityMatrix marginal(std::size_t party) const {
    const std::array<std::size_t, 1> keep{party};
    return marginal(keep);
  }

  /// Re Tr(rho X).
  double expectation(const ComplexMatrix& x) const { return trace_product_real(matrix_, x); }

 private:
  ComplexMatrix matrix_;
  Factorization factorization_;
};

/// Product state rho_1 (x) rho_2.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return {kron(a.matrix(), b.matrix()), concat(a.factorization(), b.factorization())};
}

/// Dichotomic +-1 qubit observable n.sigma for a unit Bloch direction n.
class QubitObservable {
 public:
  explicit QubitObservable(const Vec3& direction) : direction_(direction) {
    if (std::abs(norm(direction_) - 1.0) > 1e-12) {
      throw std::invalid_argument("QubitObservable: direction is not a unit vector");
    }
  }

  /// Direction from spherical angles: polar angle from +z, azimuth from +x.
  static QubitObservable from_angles(double polar, double azimuth) {
    return QubitObservable(Vec3{std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                                std::cos(polar)});
  }

  /// Normalizes an arbitrary nonzero vector.
  static QubitObservable along(const Vec3& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("QubitObservable: zero direction");
    return QubitObservable(Vec3{v[0] / n, v[1] / n, v[2] / n});
  }

  const Vec3& direction() const { return direction_; }

  ComplexMatrix matrix() const {
    return direction_[0] * pauli_x() + direction_[1] * pauli_y() + direction_[2] * pauli_z();
  }

 private:
  Vec3 direction_;
};

struct BlochVector {
  Vec3 r{};
  double norm() const { return lpow::norm(r); }
};

/// T_ij = Tr(rho sigma_i (x) sigma_j).
struct CorrelationMatrix {
  std::array<Vec3, 3> t{};

  double operator()(std::size_t i, std::size_t j) const { return t[i][j]; }

  /// u^T T v.
  double sandwich(const Vec3& u, const Vec3& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) s += u[i] * t[i][j] * v[j];
    return s;
  }

  ComplexMatrix as_matrix() const {
    ComplexMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m(i, j) = t[i][j];
    return m;
  }
};

struct HorodeckiResult {
  double s1 = 0.0;
  double s2 = 0.0;
  double m_value = 0.0;  // sqrt(s1^2 + s2^2)
  bool admits_lhv = true;

  /// Settings-optimized CHSH value, 2*sqrt(s1^2 + s2^2).
  double chsh_max() const { return 2.0 * m_value; }
};

inline BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw dimension_error("bloch_vector: expected a single-qubit state");
  BlochVector b;
  for (std::size_t i = 0; i < 3; ++i) b.r[i] = rho.expectation(pauli(i));
  return b;
}

inline CorrelationMatrix correlation_matrix(const DensityMatrix& rho) {
  if (rho.factorization() != Factorization::qubits(2)) {
    throw dimension_error("correlation_matrix: expected a two-qubit state");
  }
  CorrelationMatrix c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) c.t[i][j] = rho.expectation(kron(pauli(i), pauli(j)));
  return c;
}

inline HorodeckiResult horodecki(const DensityMatrix& rho) {
  const auto s = singular_values(correlation_matrix(rho).as_matrix());
  HorodeckiResult h;
  h.s1 = s[0];
  h.s2 = s[1];
  h.m_value = std::sqrt(h.s1 * h.s1 + h.s2 * h.s2);
  h.admits_lhv = h.m_value <= 1.0 + 1e-10;
  return h;
}

/// Bloch-level summary of a two-qubit state: everything the witnesses need.
struct TwoQubitBloch {
  BlochVector a;
  BlochVector b;
  CorrelationMatrix t;
};

inline TwoQubitBloch bloch_decomposition(const DensityMatrix& rho) {
  return {bloch_vector(rho.marginal(0)), bloch_vector(rho.marginal(1)), correlation_matrix(rho)};
}

// ---------------------------------------------------------------------------
// State families

using Ket = std::vector<cplx>;

namespace families {
struct Singlet {};
struct Werner { double p; };
struct Sigma {};
/// lambda < 0 requests the CHSH-saturating value from cg_lambda(theta).
struct Cg { double theta; double lambda = -1.0; };
struct Classical { double theta; double beta; };
struct Transition { double p; };
struct Ghz {};
struct PureProduct { std::vector<std::array<cplx, 2>> kets; };
}  // namespace families

using StateFamily = std::variant<families::Singlet, families::Werner, families::Sigma, families::Cg,
                                 families::Classical, families::Transition, families::Ghz,
                                 families::PureProduct>;

namespace detail {

inline Ket basis_ket(std::size_t dim, std::size_t index) {
  Ket k(dim, cplx{0.0, 0.0});
  k[index] = 1.0;
  return k;
}

inline Ket superpose(std::initializer_list<std::pair<cplx, std::size_t>> terms, std::size_t dim) {
  Ket k(dim, cplx{0.0, 0.0});
  for (const auto& [amp, idx] : terms) k[idx] += amp;
  return k;
}

/// sum_k w_k |psi_k><psi_k| with weights summing to one.
inline DensityMatrix mix(std::span<const double> weights, std::span<const Ket> kets, Factorization f) {
  if (weights.size() != kets.size()) throw dimension_error("mix: weight/ket count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw parameter_error("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw parameter_error("mix: weights do not sum to 1");
  ComplexMatrix m(f.total(), f.total());
  for (std::size_t i = 0; i < kets.size(); ++i) {
    if (weights[i] == 0.0) continue;
    m += weights[i] * ComplexMatrix::outer(kets[i]);
  }
  return {std::move(m), std::move(f)};
}

inline DensityMatrix pure(const Ket& k, Factorization f) {
  const std::array<double, 1> w{1.0};
  const std::array<Ket, 1> ks{k};
  return mix(w, ks, std::move(f));
}

inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error(std::string(what) + " must lie in [0, 1]");
}

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw parameter_error(std::string(what) + " must be finite");
}

// Canonical two-qubit kets, basis order |00>,|01>,|10>,|11>.
inline Ket psi_minus() {
  const double s = 1.0 / std::numbers::sqrt2;
  return superpose({{s, 1}, {-s, 2}}, 4);
}
inline Ket psi_plus() {
  const double s = 1.0 / std::numbers::sqrt2;
  return superpose({{s, 1}, {s, 2}}, 4);
}

}  // namespace detail

inline double cg_lambda(double theta);

namespace detail {

inline DensityMatrix cg_state(double theta, double lambda) {
  require_finite(theta, "theta");
  require_probability(lambda, "lambda");
  const Ket th = superpose({{std::cos(theta), 0}, {std::sin(theta), 3}}, 4);
  const std::array<double, 2> w{lambda, 1.0 - lambda};
  const std::array<Ket, 2> ks{th, basis_ket(4, 1)};
  return mix(w, ks, Factorization::qubits(2));
}

}  // namespace detail

inline DensityMatrix make_state(const StateFamily& family) {
  using namespace families;
  const auto q2 = Factorization::qubits(2);
  return std::visit(
      [&](const auto& f) -> DensityMatrix {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Singlet>) {
          return detail::pure(detail::psi_minus(), q2);
        } else if constexpr (std::is_same_v<T, Werner>) {
          detail::require_probability(f.p, "werner p");
          // p |psi-><psi-| + (1-p)/4 I, with I/4 as the uniform basis mixture.
          const double u = (1.0 - f.p) / 4.0;
          const std::array<double, 5> w{f.p, u, u, u, u};
          const std::array<Ket, 5> ks{detail::psi_minus(), detail::basis_ket(4, 0), detail::basis_ket(4, 1),
                                      detail::basis_ket(4, 2), detail::basis_ket(4, 3)};
          return detail::mix(w, ks, q2);
        } else if constexpr (std::is_same_v<T, Sigma>) {
          const double s5 = std::sqrt(5.0);
          const Ket phi = detail::superpose({{2.0 / s5, 0}, {1.0 / s5, 3}}, 4);
          const std::array<double, 2> w{0.85, 0.15};
          const std::array<Ket, 2> ks{phi, detail::basis_ket(4, 1)};
          return detail::mix(w, ks, q2);
        } else if constexpr (std::is_same_v<T, Cg>) {
          const double lambda = f.lambda < 0.0 ? cg_lambda(f.theta) : f.lambda;
          return detail::cg_state(f.theta, lambda);
        } else if constexpr (std::is_same_v<T, Classical>) {
          detail::require_finite(f.theta, "theta");
          detail::require_finite(f.beta, "beta");
          const cplx phase = std::polar(1.0, f.beta);
          const Ket k = detail::superpose({{std::cos(f.theta), 0}, {phase * std::sin(f.theta), 2}}, 4);
          return detail::pure(k, q2);
        } else if constexpr (std::is_same_v<T, Transition>) {
          detail::require_probability(f.p, "transition p");
          const std::array<double, 2> w{1.0 - f.p, f.p};
          const std::array<Ket, 2> ks{detail::psi_plus(), detail::basis_ket(4, 0)};
          return detail::mix(w, ks, q2);
        } else if constexpr (std::is_same_v<T, Ghz>) {
          const double s = 1.0 / std::numbers::sqrt2;
          return detail::pure(detail::superpose({{s, 0}, {s, 7}}, 8), Factorization::qubits(3));
        } else {
          if (f.kets.empty()) throw parameter_error("pure_product: no kets given");
          Ket k{1.0};
          for (const auto& q : f.kets) {
            const double n = std::sqrt(std::norm(q[0]) + std::norm(q[1]));
            if (n < 1e-12) throw parameter_error("pure_product: zero ket");
            Ket next;
            next.reserve(k.size() * 2);
            for (const auto& amp : k) {
              next.push_back(amp * q[0] / n);
              next.push_back(amp * q[1] / n);
            }
            k = std::move(next);
          }
          return detail::pure(k, Factorization::qubits(f.kets.size()));
        }
      },
      family);
}

/// Mixing weight lambda for which lambda P_theta + (1-lambda) P_01 sits exactly on
/// the CHSH local bound, i.e. s1^2 + s2^2 = 1 for its correlation matrix.
/// s1^2 + s2^2 is increasing in lambda on [1/2, 1], below 1 at lambda = 1/2 and
/// equal to 1 + sin^2(2 theta) at lambda = 1, so the root is bracketed there.
inline double cg_lambda(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
    throw parameter_error("cg_lambda: theta must lie in (0, pi/2)");
  }
  auto excess = [theta](double lambda) {
    const auto h = horodecki(detail::cg_state(theta, lambda));
    return h.s1 * h.s1 + h.s2 * h.s2 - 1.0;
  };
  double lo = 0.5, hi = 1.0;
  if (!(excess(lo) < 0.0 && excess(hi) > 0.0)) {
    throw parameter_error("cg_lambda: no root in (0, 1) for this theta");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace lpow
