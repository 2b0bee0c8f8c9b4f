#include "doctest.h"
#include "equihf/equivariant.hpp"
#include "equihf/random.hpp"
#include "test_util.hpp"

using namespace equihf;

namespace {

InvolutiveComplex trivial_point() {
  return {GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}}), BitMatrix::identity(1)};
}

InvolutiveComplex regular() {
  InvolutiveComplex w{GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 0, {}}}), BitMatrix(2, 2)};
  w.iota.set(0, 1, true);
  w.iota.set(1, 0, true);
  return w;
}

InvolutiveComplex arrow() {
  InvolutiveComplex w{GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}, {"y", 1, {}}}), BitMatrix::identity(2)};
  w.complex.d(1, 0) = HPoly::one();
  return w;
}

BitVec unit(int n, int i) {
  BitVec v(n);
  v.set(i, true);
  return v;
}

}  // namespace

TEST_CASE("Borel complex") {
  CHECK(borel_complex(trivial_point()).d.is_zero());
  auto r = borel_complex(regular());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(r.d(i, j) == HPoly::monomial(1));
  auto a = borel_complex(arrow());
  CHECK(a.d(1, 0).is_one());
  CHECK(a.d(0, 0).is_zero());
  CHECK(a.d(1, 1).is_zero());
  CHECK(a.d(0, 1).is_zero());

  InvolutiveComplex bad = arrow();
  bad.iota.set(1, 0, true);
  CHECK_THROWS_AS(borel_complex(bad), InputError);
}

TEST_CASE("group and Tate cohomology of small examples") {
  auto t = group_cohomology(trivial_point());
  CHECK(t.free_rank == 1);
  CHECK(t.torsion_exponents.empty());
  auto r = group_cohomology(regular());
  CHECK(r.free_rank == 0);
  CHECK(r.torsion_exponents == std::vector<int>{1});
  CHECK(group_cohomology(arrow()) == EqModuleInvariants{});
  CHECK(tate_dimension(regular()) == 0);
  CHECK(tate_dimension(trivial_point()) == 1);
}

TEST_CASE("truncation oracle for group cohomology") {
  auto g = testutil::rng(21);
  for (int t = 0; t < 60; ++t) {
    auto w = random_involutive(g, 8);
    auto inv = group_cohomology(w);
    auto c = borel_complex(w);
    for (int n = 1; n <= 6; ++n) {
      int expect = inv.free_rank * n;
      for (int a : inv.torsion_exponents) expect += 2 * std::min(a, n);
      // torsion K[h]/h^a contributes min(a,N) in each of two adjacent spots of C/h^N
      CHECK(cohomology(truncate_complex(c, n)).total == expect);
    }
  }
}

TEST_CASE("u-sequence") {
  auto t = verify_u_sequence(trivial_point());
  CHECK(t.exact());
  CHECK(t.rank_h == t.dim_h_lower);
  CHECK(t.rank_restrict == 1);
  auto r = verify_u_sequence(regular());
  CHECK(r.exact());
  CHECK(r.dim_h_v == 2);
  CHECK(r.rank_restrict == 1);

  auto g = testutil::rng(22);
  for (int k = 0; k < 60; ++k) CHECK(verify_u_sequence(random_involutive(g, 6), 2 + k % 4).exact());
}

TEST_CASE("Smith inequality") {
  auto t = smith_bound_check(trivial_point());
  CHECK(t.invariant_dim == 1);
  CHECK(t.generator_count == 1);
  CHECK(t.free_rank == 1);
  auto r = smith_bound_check(regular());
  CHECK(r.invariant_dim == 1);
  CHECK(r.generator_count == 1);
  CHECK(r.free_rank == 0);
  auto g = testutil::rng(23);
  for (int k = 0; k < 100; ++k) CHECK(smith_bound_check(random_involutive(g, 8)).holds());
}

TEST_CASE("structural properties on random involutive complexes") {
  auto g = testutil::rng(24);
  for (int k = 0; k < 80; ++k) {
    auto free = random_involutive(g, 8, InvolutionKind::LevelwiseFree);
    CHECK(tate_dimension(free) == 0);
    auto acyc = random_involutive(g, 8, InvolutionKind::Acyclic);
    CHECK(cohomology(acyc.complex).total == 0);
    CHECK(group_cohomology(acyc) == EqModuleInvariants{});
    auto w = random_involutive(g, 8);
    CHECK(tate_dimension(w) == group_cohomology(w).free_rank);
    auto triv = random_involutive(g, 6, InvolutionKind::Trivial);
    CHECK(group_cohomology(triv).free_rank == cohomology(triv.complex).total);
  }
}

TEST_CASE("equivariant quasi-isomorphisms preserve group cohomology") {
  // W -> W (+) (acyclic piece) by inclusion is an equivariant quasi-isomorphism
  auto g = testutil::rng(25);
  for (int k = 0; k < 40; ++k) {
    auto w = random_involutive(g, 5);
    auto a = random_involutive(g, 4, InvolutionKind::Acyclic);
    const int n = w.complex.size(), m = a.complex.size();
    std::vector<Generator> gens = w.complex.gens;
    for (auto gen : a.complex.gens) {
      gen.name += "'";
      gens.push_back(gen);
    }
    InvolutiveComplex sum{GradedComplex::make(Ring::GF2, Grading::Z, gens), BitMatrix(n + m, n + m)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sum.complex.d(i, j) = w.complex.d(i, j);
        sum.iota.set(i, j, w.iota.get(i, j));
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        sum.complex.d(n + i, n + j) = a.complex.d(i, j);
        sum.iota.set(n + i, n + j, a.iota.get(i, j));
      }
    PolyMatrix inc(n + m, n);
    for (int i = 0; i < n; ++i) inc(i, i) = HPoly::one();
    CHECK(quasi_iso_check(w.complex, sum.complex, {inc, 0}).quasi_iso);
    auto bw = borel_complex(w), bs = borel_complex(sum);
    CHECK(quasi_iso_check(bw, bs, {inc, 0}).quasi_iso);
    CHECK(group_cohomology(w) == group_cohomology(sum));
  }
}

TEST_CASE("squaring map") {
  auto k = GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}});
  PolyVec s = squaring_map(k, unit(1, 0));
  CHECK(s.size() == 1);
  CHECK(s[0].is_one());

  auto a = arrow().complex;
  PolyVec z = squaring_map(a, BitVec(2));
  for (const auto& e : z) CHECK(e.is_zero());
  CHECK_THROWS_AS(squaring_map(a, unit(2, 0)), InputError);

  // h (sq(v1+v2) - sq(v1) - sq(v2)) = d_C (v1 (x) v2)
  auto v = GradedComplex::make(Ring::GF2, Grading::Z, {{"v1", 0, {}}, {"v2", 0, {}}});
  auto b = borel_complex(tensor_square_swap(v));
  BitVec v1 = unit(2, 0), v2 = unit(2, 1);
  PolyVec lhs = squaring_map(v, v1 ^ v2);
  PolyVec s1 = squaring_map(v, v1), s2 = squaring_map(v, v2);
  for (size_t i = 0; i < lhs.size(); ++i) lhs[i] = (lhs[i] + s1[i] + s2[i]).shift_up(1);
  PolyVec t(4);
  t[pair_index(2, 0, 1)] = HPoly::one();
  CHECK(equihf::apply(b.d, t) == lhs);

  auto g = testutil::rng(26);
  for (int n = 0; n < 40; ++n) {
    auto c = random_complex(g, 4);
    BitMatrix d = BitMatrix::from_poly(c.d);
    auto cyc = cocycles(d).cycles;
    if (cyc.empty()) continue;
    BitVec cc = cyc[n % cyc.size()];
    BitVec w(c.size());
    for (int i = 0; i < c.size(); ++i) w.set(i, (n >> i) & 1);
    CHECK(squaring_well_defined(c, cc, w));
  }
}

TEST_CASE("Kaledin isomorphism") {
  auto k = GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}});
  CHECK(kaledin_check(k).bijective());
  auto k2 = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 0, {}}});
  auto r2 = kaledin_check(k2);
  CHECK(r2.dim_h == 2);
  CHECK(r2.dim_tate == 2);
  CHECK(r2.bijective());
  auto ra = kaledin_check(arrow().complex);
  CHECK(ra.dim_h == 0);
  CHECK(ra.dim_tate == 0);
  CHECK(ra.bijective());
  auto g = testutil::rng(27);
  for (int n = 0; n < 40; ++n) CHECK(kaledin_check(random_complex(g, 6)).bijective());
}
