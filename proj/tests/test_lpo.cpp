#include <gtest/gtest.h>

#include "support.hpp"

using namespace lpow;
using lpow::test::Rng;

namespace {

/// (X)^A = Tr_B[(I (x) rho_B) X] written out with the basis-sandwich oracle.
ComplexMatrix lpo_oracle_a(const ComplexMatrix& x, const DensityMatrix& rho) {
  const auto rho_b = test::trace_out_first(rho.matrix(), 2, 2);
  return test::trace_out_second(test::kron_oracle(ComplexMatrix::identity(2), rho_b) * x, 2, 2);
}

ComplexMatrix lpo_oracle_b(const ComplexMatrix& x, const DensityMatrix& rho) {
  const auto rho_a = test::trace_out_second(rho.matrix(), 2, 2);
  return test::trace_out_first(test::kron_oracle(rho_a, ComplexMatrix::identity(2)) * x, 2, 2);
}

const DensityMatrix& product_00() {
  static const auto rho = make_state(families::PureProduct{{{1.0, 0.0}, {1.0, 0.0}}});
  return rho;
}

}  // namespace

TEST(LpoProject, ZZOnZeroZeroKeepsSigmaZ) {
  const auto p = lpo_project(kron(pauli_z(), pauli_z()), product_00(), 0);
  EXPECT_EQ(p.kept, 0u);
  EXPECT_LT(max_abs_diff(p.matrix, pauli_z()), 1e-15);
}

TEST(LpoProject, IdentityMapsToIdentity) {
  Rng rng(31);
  const auto rho = test::random_two_qubit(rng);
  for (std::size_t k = 0; k < 2; ++k)
    EXPECT_LT(max_abs_diff(lpo_project(ComplexMatrix::identity(4), rho, k).matrix, ComplexMatrix::identity(2)),
              1e-12);
}

TEST(LpoProject, GhzXXXVanishes) {
  const std::array<ComplexMatrix, 3> xs{pauli_x(), pauli_x(), pauli_x()};
  const auto ghz = make_state(families::Ghz{});
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_LT(max_abs_diff(lpo_project(kron_all(xs), ghz, k).matrix, ComplexMatrix::zero(2, 2)), 1e-15);
}

TEST(LpoProject, ThreePartyUsesProductOfMarginals) {
  Rng rng(32);
  const auto rho = test::random_state(rng, Factorization::qubits(3));
  const auto x = test::random_hermitian(rng, 8);
  // (X)^B = Tr_AC[(rho_A (x) I (x) rho_C) X], via the library partial trace on an
  // explicitly assembled weight.
  const std::array<ComplexMatrix, 3> w{rho.marginal(0).matrix(), ComplexMatrix::identity(2),
                                       rho.marginal(2).matrix()};
  const auto expected = partial_trace(test::kron_oracle(test::kron_oracle(w[0], w[1]), w[2]) * x,
                                      Factorization::qubits(3), {1});
  EXPECT_LT(max_abs_diff(lpo_project(x, rho, 1).matrix, expected), 1e-12);
}

TEST(LpoProject, MatchesOracleOnRandomInputs) {
  Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto x = test::ginibre(rng, 4, 4);
    EXPECT_LT(max_abs_diff(lpo_project(x, rho, 0).matrix, lpo_oracle_a(x, rho)), 1e-12);
    EXPECT_LT(max_abs_diff(lpo_project(x, rho, 1).matrix, lpo_oracle_b(x, rho)), 1e-12);
  }
}

TEST(LpoProject, RejectsDimensionMismatch) {
  EXPECT_THROW(lpo_project(ComplexMatrix::identity(8), product_00(), 0), dimension_error);
  EXPECT_THROW(lpo_project(ComplexMatrix::identity(4), product_00(), 2), dimension_error);
}

TEST(PerceivedExpectation, ProductStateEqualsPlainExpectation) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const auto rho = tensor(test::random_state(rng, Factorization::qubits(1)),
                            test::random_state(rng, Factorization::qubits(1)));
    const auto x = test::random_hermitian(rng, 4);
    EXPECT_NEAR(perceived_expectation(x, rho, 0), rho.expectation(x), 1e-12);
  }
}

TEST(PerceivedExpectation, SingletZZIsZero) {
  const auto singlet = make_state(families::Singlet{});
  const auto zz = kron(pauli_z(), pauli_z());
  EXPECT_NEAR(singlet.expectation(zz), -1.0, 1e-15);
  EXPECT_NEAR(perceived_expectation(zz, singlet, 0), 0.0, 1e-15);
  for (double p : {0.0, 0.2, 0.6, 1.0})
    EXPECT_NEAR(perceived_expectation(zz, make_state(families::Werner{p}), 1), 0.0, 1e-15);
}

TEST(PerceivedExpectation, RejectsNonHermitian) {
  auto x = ComplexMatrix::identity(4);
  x(0, 1) = 1.0;
  EXPECT_THROW(perceived_expectation(x, product_00(), 0), std::invalid_argument);
}

TEST(LpoCorrelator, SingletBellSettingsVanish) {
  const auto singlet = make_state(families::Singlet{});
  const auto s = bell_settings();
  for (const auto& a : s.alice)
    for (const auto& b : s.bob) EXPECT_NEAR(lpo_correlator(a, b, singlet), 0.0, 1e-15);
}

TEST(LpoCorrelator, ZeroZeroSigmaZ) {
  const QubitObservable z({0, 0, 1});
  EXPECT_NEAR(lpo_correlator(z, z, product_00()), 1.0, 1e-15);
}

TEST(LpoCorrelator, SigmaStateSigmaZ) {
  // a = 0.83 - 0.17, b = 0.68 - 0.32, C_zz = 0.85 - 0.15
  const QubitObservable z({0, 0, 1});
  const auto sigma = make_state(families::Sigma{});
  EXPECT_NEAR(lpo_correlator(z, z, sigma), 0.66 * 0.36 * 0.70, 1e-12);
  EXPECT_NEAR(lpo_correlator_explicit(z, z, sigma), 0.16632, 1e-12);
}

TEST(LpoProperty, Linearity) {
  Rng rng(35);
  for (int t = 0; t < 200; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto x = test::ginibre(rng, 4, 4), y = test::ginibre(rng, 4, 4);
    const cplx a{test::gaussian(rng), test::gaussian(rng)}, b{test::gaussian(rng), test::gaussian(rng)};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto lhs = lpo_project(a * x + b * y, rho, k).matrix;
      const auto rhs = a * lpo_project(x, rho, k).matrix + b * lpo_project(y, rho, k).matrix;
      EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
    }
  }
}

TEST(LpoProperty, PovmElementsProjectToPovm) {
  Rng rng(36);
  for (int t = 0; t < 200; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto povm = test::random_povm(rng, 4, 2 + static_cast<std::size_t>(rng() % 4));
    for (std::size_t k = 0; k < 2; ++k) {
      ComplexMatrix sum(2, 2);
      double total = 0.0;
      for (const auto& e : povm) {
        const auto p = lpo_project(e, rho, k).matrix;
        sum += p;
        total += rho.marginal(k).expectation(p);
      }
      EXPECT_LE(max_abs_diff(sum, ComplexMatrix::identity(2)), 1e-10);
      EXPECT_NEAR(total, 1.0, 1e-10);
    }
  }
}

TEST(LpoProperty, SideSymmetryOfPerceivedExpectation) {
  Rng rng(37);
  for (int t = 0; t < 300; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto x = test::random_hermitian(rng, 4);
    const double a = perceived_expectation(x, rho, 0);
    EXPECT_NEAR(a, perceived_expectation(x, rho, 1), 1e-12);
    // both equal Tr[(rho_A (x) rho_B) X]
    EXPECT_NEAR(a, tensor(rho.marginal(0), rho.marginal(1)).expectation(x), 1e-12);
  }
}

TEST(LpoProperty, HermitianInHermitianOut) {
  Rng rng(38);
  for (int t = 0; t < 200; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto x = test::random_hermitian(rng, 4);
    EXPECT_TRUE(is_hermitian(lpo_project(x, rho, 0).matrix));
    EXPECT_TRUE(is_hermitian(lpo_project(x, rho, 1).matrix));
  }
}

TEST(LpoProperty, CorrelatorProductFormulaMatchesOperatorRoute) {
  Rng rng(39);
  for (int t = 0; t < 500; ++t) {
    const auto rho = test::random_two_qubit(rng);
    const auto a = test::random_observable(rng), b = test::random_observable(rng);
    EXPECT_NEAR(lpo_correlator(a, b, rho), lpo_correlator_explicit(a, b, rho), 1e-10);
  }
}
