#include "doctest.h"
#include "dspmem/basis.hpp"

using namespace dspmem;

namespace {

// independent enumeration oracle: count (n_ph, n_a, n_c) with the sector
// constraints by brute force over a generous cube
int brute_force_dim(Flavor flavor, int excitation, int atoms) {
  int count = 0;
  for (int p = 0; p <= excitation; ++p)
    for (int a = 0; a <= excitation; ++a)
      for (int c = 0; c <= excitation; ++c) {
        if (p + a + c != excitation) continue;
        if (flavor == Flavor::Dicke && a + c > atoms) continue;
        ++count;
      }
  return count;
}

}  // namespace

TEST_CASE("vacuum sector is one-dimensional") {
  auto s = enumerate_sector(Flavor::Bosonic, 0);
  REQUIRE(s->dim() == 1);
  CHECK(s->state(0) == BasisState{0, 0, 0});
}

TEST_CASE("bosonic sector dimension is (M+1)(M+2)/2") {
  for (int m = 0; m <= 10; ++m) {
    auto s = enumerate_sector(Flavor::Bosonic, m);
    CHECK(s->dim() == (m + 1) * (m + 2) / 2);
    CHECK(s->dim() == brute_force_dim(Flavor::Bosonic, m, 0));
  }
  CHECK(enumerate_sector(Flavor::Bosonic, 2)->dim() == 6);
}

TEST_CASE("Dicke sector dimension matches the constraint-set count") {
  // single atom, two excitations: photon carries what the atom cannot
  auto s = enumerate_sector(Flavor::Dicke, 2, 1);
  CHECK(s->dim() == brute_force_dim(Flavor::Dicke, 2, 1));
  CHECK(s->dim() == 3);  // (2,0,0), (1,1,0), (1,0,1)
  for (int n = 1; n <= 6; ++n)
    for (int m = 0; m <= 5; ++m)
      CHECK(enumerate_sector(Flavor::Dicke, m, n)->dim() == brute_force_dim(Flavor::Dicke, m, n));
}

TEST_CASE("Dicke flavor rejects N < 1") {
  CHECK_THROWS_AS(enumerate_sector(Flavor::Dicke, 1, 0), std::invalid_argument);
}

TEST_CASE("enumeration is deterministic and lexicographic") {
  auto a = enumerate_sector(Flavor::Bosonic, 5);
  auto b = enumerate_sector(Flavor::Bosonic, 5);
  REQUIRE(a->dim() == b->dim());
  for (int i = 0; i < a->dim(); ++i) {
    CHECK(a->state(i) == b->state(i));
    if (i > 0) {
      const auto& x = a->state(i - 1);
      const auto& y = a->state(i);
      CHECK((x.n_ph < y.n_ph || (x.n_ph == y.n_ph && x.n_a < y.n_a)));
    }
  }
}

TEST_CASE("index_of is the inverse of enumeration") {
  auto s = enumerate_sector(Flavor::Dicke, 4, 3);
  for (int i = 0; i < s->dim(); ++i) CHECK(s->index_of(s->state(i)) == i);
  CHECK(s->index_of({4, 0, 0}) >= 0);
  CHECK(s->index_of({0, 2, 2}) == -1);  // violates n_a + n_c <= N
  CHECK(s->index_of({1, 1, 1}) == -1);  // wrong excitation number
}

TEST_CASE("sector chain exposes the empty M=-1 sector") {
  SectorChain chain(Flavor::Bosonic, 3);
  CHECK(chain.at(-1)->dim() == 0);
  CHECK(chain.at(3)->dim() == 10);
  CHECK_THROWS_AS(chain.at(4), std::out_of_range);
}
