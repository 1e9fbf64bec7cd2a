#include <random>

#include "doctest.h"
#include "dspmem/sparse.hpp"

using namespace dspmem;

namespace {

SparseOperator random_operator(const SectorPtr& cod, const SectorPtr& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SparseOperator::Triplet> t;
  for (int r = 0; r < cod->dim(); ++r)
    for (int c = 0; c < dom->dim(); ++c)
      if (u(rng) > 0.0) t.push_back({r, c, {u(rng), u(rng)}});
  return SparseOperator::from_triplets(cod, dom, std::move(t));
}

StateVector random_state(const SectorPtr& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(s->dim());
  for (int i = 0; i < s->dim(); ++i) v[i] = Complex(u(rng), u(rng));
  return StateVector(s, v).normalized();
}

}  // namespace

TEST_CASE("identity application and inner product basics") {
  auto s = enumerate_sector(Flavor::Bosonic, 3);
  std::mt19937_64 rng(7);
  StateVector psi = random_state(s, rng);
  StateVector same = SparseOperator::identity(s).apply(psi);
  CHECK((same.amps() - psi.amps()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);
  // conjugate-linear in the first argument
  StateVector phi = random_state(s, rng);
  CHECK(std::abs(inner(Complex(0, 1) * psi, phi) - Complex(0, -1) * inner(psi, phi)) < 1e-14);
}

TEST_CASE("addition distributes over application") {
  auto s = enumerate_sector(Flavor::Bosonic, 4);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    SparseOperator x = random_operator(s, s, rng);
    SparseOperator y = random_operator(s, s, rng);
    StateVector psi = random_state(s, rng);
    StateVector lhs = op_add(x, y).apply(psi);
    StateVector rhs = x.apply(psi) + y.apply(psi);
    CHECK((lhs.amps() - rhs.amps()).norm() < 1e-12);
  }
}

TEST_CASE("product agrees with sequential application, including rectangular shapes") {
  auto s2 = enumerate_sector(Flavor::Bosonic, 2);
  auto s3 = enumerate_sector(Flavor::Bosonic, 3);
  auto s4 = enumerate_sector(Flavor::Bosonic, 4);
  std::mt19937_64 rng(13);
  SparseOperator up = random_operator(s3, s2, rng);
  SparseOperator up2 = random_operator(s4, s3, rng);
  StateVector psi = random_state(s2, rng);
  StateVector lhs = op_mul(up2, up).apply(psi);
  StateVector rhs = up2.apply(up.apply(psi));
  CHECK((lhs.amps() - rhs.amps()).norm() < 1e-12);
}

TEST_CASE("adjoint is an involution and matches the inner-product definition") {
  auto s2 = enumerate_sector(Flavor::Bosonic, 2);
  auto s3 = enumerate_sector(Flavor::Bosonic, 3);
  std::mt19937_64 rng(17);
  SparseOperator x = random_operator(s3, s2, rng);
  SparseOperator xdd = op_adjoint(op_adjoint(x));
  CHECK((x.dense() - xdd.dense()).norm() == 0.0);  // exact involution
  StateVector a = random_state(s3, rng);
  StateVector b = random_state(s2, rng);
  CHECK(std::abs(inner(a, x.apply(b)) - inner(op_adjoint(x).apply(a), b)) < 1e-12);
}

TEST_CASE("self-commutator vanishes") {
  auto s = enumerate_sector(Flavor::Bosonic, 3);
  std::mt19937_64 rng(19);
  SparseOperator x = random_operator(s, s, rng);
  CHECK(op_commutator(x, x).frobenius_norm() == 0.0);
}

TEST_CASE("shape errors are rejected") {
  auto s2 = enumerate_sector(Flavor::Bosonic, 2);
  auto s3 = enumerate_sector(Flavor::Bosonic, 3);
  std::mt19937_64 rng(23);
  SparseOperator x = random_operator(s2, s2, rng);
  SparseOperator y = random_operator(s3, s3, rng);
  CHECK_THROWS_AS(op_add(x, y), std::invalid_argument);
  CHECK_THROWS_AS(op_mul(x, y), std::invalid_argument);
  CHECK_THROWS_AS(x.apply(random_state(s3, rng)), std::invalid_argument);
}

TEST_CASE("zero-drop threshold prunes storage") {
  auto s = enumerate_sector(Flavor::Bosonic, 1);
  std::vector<SparseOperator::Triplet> t{{0, 0, 1e-16}, {1, 1, 1.0}, {2, 2, -1.0}, {2, 2, 1.0}};
  SparseOperator x = SparseOperator::from_triplets(s, s, std::move(t));
  CHECK(x.nnz() == 1);
}

TEST_CASE("empty sectors give zero-shaped operators") {
  auto empty = enumerate_sector(Flavor::Bosonic, -1);
  auto s0 = enumerate_sector(Flavor::Bosonic, 0);
  SparseOperator down(empty, s0);  // annihilation out of the vacuum sector
  CHECK(down.rows() == 0);
  CHECK(down.operator_norm() == 0.0);
  StateVector vac = StateVector::basis_vector(s0, {0, 0, 0});
  CHECK(down.apply(vac).dim() == 0);
}
