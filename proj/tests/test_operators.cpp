#include <random>

#include "doctest.h"
#include "dspmem/operators.hpp"

using namespace dspmem;

TEST_CASE("bosonic commutator relations close exactly") {
  ModelParams params{1.0, 0.7, 1};
  for (int sector : {0, 1, 2, 5, 8}) {
    CommutatorReport rep = commutator_report(Flavor::Bosonic, params, sector);
    for (const auto& row : rep.rows) {
      CAPTURE(row.relation);
      CAPTURE(sector);
      CHECK(row.exact);
      CHECK(row.deviation < 1e-12);
    }
  }
}

TEST_CASE("exact Dicke relations hold for all N, asymptotic ones deviate") {
  for (int atoms : {1, 2, 5, 20, 100}) {
    ModelParams params{1.0, 0.7, atoms};
    CommutatorReport rep = commutator_report(Flavor::Dicke, params, 2);
    for (const auto& row : rep.rows) {
      CAPTURE(atoms);
      CAPTURE(row.relation);
      if (row.exact) CHECK(row.deviation < 1e-12);
    }
  }
  // [A,A+]-1 deviation is of order M/N: N=100, M=2 gives a few percent
  CommutatorReport rep = commutator_report(Flavor::Dicke, ModelParams{1.0, 0.5, 100}, 2);
  const auto& aa = rep.rows.front();
  REQUIRE(aa.relation == "[A,A+]-1");
  CHECK(aa.deviation > 0.005);
  CHECK(aa.deviation < 0.1);
}

TEST_CASE("Dicke A+ on the collective ground state has unit amplitude") {
  for (int atoms : {1, 3, 17}) {
    ModelParams params{1.0, 0.0, atoms};
    SectorChain chain(Flavor::Dicke, 2, atoms);
    OperatorSet ops = build_operators(Flavor::Dicke, params, chain);
    StateVector vac = StateVector::basis_vector(chain.at(0), {0, 0, 0});
    StateVector one = ops.exc_a_raise.apply(vac);
    CHECK(one.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(one[chain.at(1)->index_of({0, 1, 0})] - 1.0) < 1e-14);
  }
}

TEST_CASE("one atom cannot be doubly excited (hard wall)") {
  ModelParams params{1.0, 0.0, 1};
  SectorChain chain(Flavor::Dicke, 2, 1);
  OperatorSet ops = build_operators(Flavor::Dicke, params, chain);
  StateVector vac = StateVector::basis_vector(chain.at(0), {0, 0, 0});
  StateVector twice = ops.exc_a_raise.apply(ops.exc_a_raise.apply(vac));
  CHECK(twice.norm() == 0.0);
}

TEST_CASE("Hamiltonians are Hermitian and conserve excitation number") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    ModelParams params{u(rng), u(rng), 4};
    for (Flavor flavor : {Flavor::Bosonic, Flavor::Dicke}) {
      SectorChain chain(flavor, 5, params.atoms);
      OperatorFamily h = build_hamiltonian(flavor, params, chain);
      for (int m = 0; m <= 4; ++m) {
        const SparseOperator& block = h.block(m);
        CHECK(block.square());  // maps the sector into itself by construction
        CHECK(op_sub(block, op_adjoint(block)).max_abs() < 1e-14);
      }
    }
  }
}

TEST_CASE("vacuum sector Hamiltonian is the 1x1 zero matrix") {
  SectorChain chain(Flavor::Bosonic, 1);
  OperatorFamily h = build_hamiltonian(Flavor::Bosonic, ModelParams{1.0, 2.0, 1}, chain);
  CHECK(h.block(0).nnz() == 0);
}

TEST_CASE("one-excitation eigenvalues are {-eps, 0, +eps}") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams params{u(rng), u(rng), 1};
    SectorChain chain(Flavor::Bosonic, 2);
    OperatorFamily h = build_hamiltonian(Flavor::Bosonic, params, chain);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.block(1).dense());
    const double eps = std::hypot(params.coupling, params.rabi);
    REQUIRE(es.eigenvalues().size() == 3);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-eps).epsilon(1e-12));
    CHECK(std::abs(es.eigenvalues()[1]) < 1e-12);
    CHECK(es.eigenvalues()[2] == doctest::Approx(eps).epsilon(1e-12));
  }
}

TEST_CASE("two-excitation spectrum at G = Omega = 1") {
  SectorChain chain(Flavor::Bosonic, 3);
  OperatorFamily h = build_hamiltonian(Flavor::Bosonic, ModelParams{1.0, 1.0, 1}, chain);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.block(2).dense());
  const double eps = std::sqrt(2.0);
  const double expected[6] = {-2 * eps, -eps, 0.0, 0.0, eps, 2 * eps};
  REQUIRE(es.eigenvalues().size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(es.eigenvalues()[i] - expected[i]) < 1e-12);
}

TEST_CASE("polariton limits: theta=0 gives D=a, theta=pi/2 gives D=-C") {
  SectorChain chain(Flavor::Bosonic, 3);
  OperatorSet ops = build_operators(Flavor::Bosonic, ModelParams{1.0, 0.0, 1}, chain);
  PolaritonOps at_zero = polariton_ops(PolaritonAngle::from_theta(0.0, 1.0), ops);
  PolaritonOps at_half = polariton_ops(PolaritonAngle::from_theta(M_PI / 2.0, 1.0), ops);
  for (int m = 1; m <= 3; ++m) {
    CHECK(op_sub(at_zero.dark_low.block(m), ops.ph_low.block(m)).max_abs() < 1e-15);
    CHECK(op_add(at_half.dark_low.block(m), ops.exc_c_low.block(m)).max_abs() < 1e-15);
  }
  CHECK_THROWS_AS(
      polariton_ops(PolaritonAngle::from_theta(0.3, 1.0),
                    build_operators(Flavor::Dicke, ModelParams{1.0, 0.0, 2},
                                    SectorChain(Flavor::Dicke, 2, 2))),
      std::invalid_argument);
}

TEST_CASE("ladder relation [H, Q+-^dag] = +-eps Q+-^dag") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.3, 2.5);
  for (int trial = 0; trial < 4; ++trial) {
    ModelParams params{u(rng), u(rng), 1};
    SectorChain chain(Flavor::Bosonic, 7);
    OperatorSet ops = build_operators(Flavor::Bosonic, params, chain);
    OperatorFamily h = build_hamiltonian(ops);
    const PolaritonAngle angle = PolaritonAngle::from_params(params.coupling, params.rabi);
    PolaritonOps pol = polariton_ops(angle, ops);
    for (int m = 0; m <= 5; ++m) {
      SparseOperator lhs_p = op_sub(op_mul(h.block(m + 1), pol.q_plus_raise.block(m)),
                                    op_mul(pol.q_plus_raise.block(m), h.block(m)));
      CHECK(op_sub(lhs_p, op_scale(angle.eps, pol.q_plus_raise.block(m))).operator_norm() < 1e-12);
      SparseOperator lhs_m = op_sub(op_mul(h.block(m + 1), pol.q_minus_raise.block(m)),
                                    op_mul(pol.q_minus_raise.block(m), h.block(m)));
      CHECK(op_sub(lhs_m, op_scale(-angle.eps, pol.q_minus_raise.block(m))).operator_norm() < 1e-12);
    }
  }
}

TEST_CASE("Dicke Hamiltonian converges to the bosonic one as N grows") {
  const int sector = 3;
  ModelParams base{1.0, 0.8, 1};
  SectorChain bchain(Flavor::Bosonic, sector + 1);
  Eigen::MatrixXcd boson =
      build_hamiltonian(Flavor::Bosonic, base, bchain).block(sector).dense();
  double prev = 1e300;
  for (int atoms : {8, 16, 32, 64, 128}) {
    ModelParams p = base;
    p.atoms = atoms;
    SectorChain chain(Flavor::Dicke, sector + 1, atoms);
    Eigen::MatrixXcd dicke = build_hamiltonian(Flavor::Dicke, p, chain).block(sector).dense();
    REQUIRE(dicke.rows() == boson.rows());  // same labeling once N >= M
    const double diff = (dicke - boson).cwiseAbs().maxCoeff();
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 0.05);
}
