// lpo.hpp
// Local perception operators (X)^J_rho = Tr_{not J}[(I_J (x) rho_{not J}) X].
//
// For more than two parties the complement factor is the tensor product of
// the complement's single-party marginals, e.g. for three qubits
// (X)^A_rho = Tr_BC[(I (x) rho_B (x) rho_C) X].

#pragma once

#include <array>
#include <vector>

#include "lpow/states.hpp"

namespace lpow {

struct LocalPerceivedOperator {
  ComplexMatrix matrix;  // acts on the kept subsystem only
  std::size_t kept = 0;
  DensityMatrix source;
};

namespace detail {

/// I on `keep`, single-party marginals of rho everywhere else.
inline ComplexMatrix complement_weight(const DensityMatrix& rho, std::size_t keep) {
  std::vector<ComplexMatrix> factors;
  factors.reserve(rho.parties());
  for (std::size_t p = 0; p < rho.parties(); ++p) {
    factors.push_back(p == keep ? ComplexMatrix::identity(rho.factorization().dims[p])
                                : rho.marginal(p).matrix());
  }
  return kron_all(factors);
}

}  // namespace detail

inline LocalPerceivedOperator lpo_project(const ComplexMatrix& x, const DensityMatrix& rho, std::size_t keep) {
  if (!x.is_square() || x.rows() != rho.dim()) {
    throw dimension_error("lpo_project: operator " + x.shape() + " does not act on the state's space");
  }
  if (keep >= rho.parties()) throw dimension_error("lpo_project: kept subsystem out of range");
  const std::array<std::size_t, 1> k{keep};
  return {partial_trace(detail::complement_weight(rho, keep) * x, rho.factorization(), k), keep, rho};
}

/// Tr[rho_J (X)^J_rho], which equals Tr[(rho_A (x) rho_B (x) ...) X] for every J.
inline double perceived_expectation(const ComplexMatrix& x, const DensityMatrix& rho, std::size_t side) {
  if (!is_hermitian(x)) throw std::invalid_argument("perceived_expectation: operator is not Hermitian");
  const auto lpo = lpo_project(x, rho, side);
  return rho.marginal(side).expectation(lpo.matrix);
}

/// a_i b_j C_ij with a_i = Tr(rho_A A_i), b_j = Tr(rho_B B_j), C_ij = Tr(rho A_i (x) B_j).
inline double lpo_correlator(const QubitObservable& ax, const QubitObservable& by, const DensityMatrix& rho) {
  if (rho.factorization() != Factorization::qubits(2)) {
    throw dimension_error("lpo_correlator: expected a two-qubit state");
  }
  const auto a_op = ax.matrix();
  const auto b_op = by.matrix();
  const double a = rho.marginal(0).expectation(a_op);
  const double b = rho.marginal(1).expectation(b_op);
  const double c = rho.expectation(kron(a_op, b_op));
  return a * b * c;
}

/// Same quantity through the operators: Tr[rho (X)^A_rho (x) (X)^B_rho] with X = A_i (x) B_j.
inline double lpo_correlator_explicit(const QubitObservable& ax, const QubitObservable& by,
                                      const DensityMatrix& rho) {
  const auto x = kron(ax.matrix(), by.matrix());
  const auto pa = lpo_project(x, rho, 0);
  const auto pb = lpo_project(x, rho, 1);
  return rho.expectation(kron(pa.matrix, pb.matrix));
}

}  // namespace lpow
