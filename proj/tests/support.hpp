// Shared test helpers: random states, settings and POVMs, plus small oracles
// computed from definitions rather than through the library's own routines.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "lpow/witness.hpp"

namespace lpow::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * unit_uniform(rng);
}

inline double gaussian(Rng& rng) {
  // Box-Muller on the portable uniform, so corpora match across standard libraries.
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline ComplexMatrix ginibre(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = cplx{gaussian(rng), gaussian(rng)};
  return g;
}

/// Random mixed state: G G^dagger / Tr, G of size d x rank.
inline DensityMatrix random_state(Rng& rng, const Factorization& f, std::size_t rank = 0) {
  const auto d = f.total();
  const auto g = ginibre(rng, d, rank ? rank : d);
  ComplexMatrix m = g * g.adjoint();
  m *= 1.0 / m.trace().real();
  // Symmetrize away rounding so the Hermiticity check sees an exact adjoint.
  ComplexMatrix h = m + m.adjoint();
  h *= 0.5;
  return {h, f};
}

inline DensityMatrix random_two_qubit(Rng& rng) {
  // Mix ranks so pure, low-rank and full-rank states all appear.
  const std::size_t rank = 1 + static_cast<std::size_t>(rng() % 4);
  return random_state(rng, Factorization::qubits(2), rank);
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t d) {
  const auto g = ginibre(rng, d, d);
  ComplexMatrix h = g + g.adjoint();
  h *= 0.5;
  return h;
}

inline Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v{gaussian(rng), gaussian(rng), gaussian(rng)};
    const double n = norm(v);
    if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

inline QubitObservable random_observable(Rng& rng) { return QubitObservable(random_unit(rng)); }

inline MeasurementScenario random_scenario(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<QubitObservable> a, b;
  for (std::size_t i = 0; i < m; ++i) a.push_back(random_observable(rng));
  for (std::size_t i = 0; i < n; ++i) b.push_back(random_observable(rng));
  return {std::move(a), std::move(b)};
}

/// Random orthonormal frame (rows), via Gram-Schmidt on Gaussian vectors.
inline std::array<Vec3, 3> random_frame(Rng& rng) {
  const Vec3 e0 = random_unit(rng);
  Vec3 v = random_unit(rng);
  const double p = dot(v, e0);
  Vec3 e1{v[0] - p * e0[0], v[1] - p * e0[1], v[2] - p * e0[2]};
  const double n1 = norm(e1);
  e1 = {e1[0] / n1, e1[1] / n1, e1[2] / n1};
  const Vec3 e2{e0[1] * e1[2] - e0[2] * e1[1], e0[2] * e1[0] - e0[0] * e1[2], e0[0] * e1[1] - e0[1] * e1[0]};
  return {e0, e1, e2};
}

inline MeasurementScenario random_orthogonal_scenario(Rng& rng, std::size_t m, std::size_t n) {
  const auto fa = random_frame(rng), fb = random_frame(rng);
  std::vector<QubitObservable> a, b;
  for (std::size_t i = 0; i < m; ++i) a.push_back(QubitObservable::along(fa[i]));
  for (std::size_t i = 0; i < n; ++i) b.push_back(QubitObservable::along(fb[i]));
  return {std::move(a), std::move(b), true};
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// Random k-outcome POVM on dimension d: E_k = S^{-1/2} G_k G_k^dagger S^{-1/2}.
inline std::vector<ComplexMatrix> random_povm(Rng& rng, std::size_t d, std::size_t k) {
  std::vector<Eigen::MatrixXcd> pos;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) {
    const auto g = to_eigen(ginibre(rng, d, d));
    pos.push_back(g * g.adjoint());
    s += pos.back();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
  const Eigen::MatrixXcd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<ComplexMatrix> out;
  for (const auto& p : pos) {
    Eigen::MatrixXcd e = inv_sqrt * p * inv_sqrt;
    e = 0.5 * (e + e.adjoint()).eval();
    out.push_back(from_eigen(e));
  }
  return out;
}

/// Random single-qubit unitary from a Haar-like QR of a Ginibre matrix.
inline ComplexMatrix random_unitary(Rng& rng, std::size_t d) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(to_eigen(ginibre(rng, d, d)));
  return from_eigen(qr.householderQ() * Eigen::MatrixXcd::Identity(d, d));
}

// ---------------------------------------------------------------------------
// Oracles

/// Kronecker product straight from (A (x) B)_{(i k),(j l)} = A_ij B_kl.
inline ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < b.rows(); ++k)
      for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Tr_B of an (dA dB) x (dA dB) matrix as sum_k (I (x) <k|) M (I (x) |k>).
inline ComplexMatrix trace_out_second(const ComplexMatrix& m, std::size_t da, std::size_t db) {
  ComplexMatrix out(da, da);
  for (std::size_t k = 0; k < db; ++k) {
    ComplexMatrix bra(1, db);
    bra(0, k) = 1.0;
    const auto proj = kron_oracle(ComplexMatrix::identity(da), bra);
    out += proj * m * proj.adjoint();
  }
  return out;
}

/// Tr_A, same construction with the basis vector on the left.
inline ComplexMatrix trace_out_first(const ComplexMatrix& m, std::size_t da, std::size_t db) {
  ComplexMatrix out(db, db);
  for (std::size_t k = 0; k < da; ++k) {
    ComplexMatrix bra(1, da);
    bra(0, k) = 1.0;
    const auto proj = kron_oracle(bra, ComplexMatrix::identity(db));
    out += proj * m * proj.adjoint();
  }
  return out;
}

/// Maximum of F over the box [-sa, sa]^m x [-sb, sb]^n by dense random sampling
/// plus all vertices; used where the vertex claim itself is under test.
inline double brute_box_max(const BellFunctional& f, double sa, double sb, Rng& rng, int samples) {
  double best = -INFINITY;
  std::vector<double> a(f.m), b(f.n);
  for (int s = 0; s < samples; ++s) {
    for (auto& x : a) x = uniform(rng, -sa, sa);
    for (auto& y : b) y = uniform(rng, -sb, sb);
    best = std::max(best, bilinear_value(f, a, b));
  }
  return best;
}

}  // namespace lpow::test
