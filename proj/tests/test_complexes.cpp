#include "doctest.h"
#include "equihf/complexes.hpp"
#include "equihf/random.hpp"
#include "test_util.hpp"

using namespace equihf;

namespace {

GradedComplex two_step(bool back_edge = false) {
  auto c = GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}, {"y", 1, {}}});
  c.d(1, 0) = HPoly::one();
  if (back_edge) c.d(0, 1) = HPoly::one();
  return c;
}

}  // namespace

TEST_CASE("check_complex") {
  CHECK(check_complex(two_step()).ok());
  auto bad = check_complex(two_step(true));
  CHECK_FALSE(bad.ok());
  CHECK_FALSE(bad.grading_violations.empty());

  auto c = GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, Action(0)}, {"y", 1, Action(1, 10)}});
  c.d(1, 0) = HPoly::one();
  c.strict_action = true;
  CHECK(check_complex(c).ok());
  c.gens[1].action = Action(-1);
  CHECK_FALSE(check_complex(c).action_violations.empty());

  GradedComplex m = two_step();
  m.d = PolyMatrix(3, 3);
  CHECK_FALSE(check_complex(m).structural_ok);
}

TEST_CASE("h shifts degree by one") {
  auto c = GradedComplex::make(Ring::Poly, Grading::Z, {{"a", 0, {}}, {"b", 0, {}}});
  c.d(1, 0) = HPoly::monomial(1);
  CHECK(check_complex(c).ok());
  c.d(1, 0) = HPoly::one();
  CHECK_FALSE(check_complex(c).ok());
  c.grading = Grading::Z2;
  c.d(1, 0) = HPoly::monomial(3);
  CHECK(check_complex(c).ok());
}

TEST_CASE("cohomology over fields and over GF(2)[h]") {
  CHECK(cohomology(two_step()).total == 0);
  auto z = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 0, {}}, {"c", 1, {}}, {"d", 2, {}}});
  auto h = cohomology(z);
  CHECK(h.total == 4);
  CHECK(h.dims[0] == 2);
  CHECK(h.dims[1] == 1);
  CHECK(h.dims[2] == 1);

  // the Clifford torus differential with h(id + rho) added
  auto cl = GradedComplex::make(Ring::Poly, Grading::Z2,
                                {{"x--", 0, {}}, {"x-+", 1, {}}, {"x+-", 1, {}}, {"x++", 0, {}}});
  const HPoly one = HPoly::one(), hh = HPoly::monomial(1);
  for (int s : {0, 3}) {
    cl.d(1, s) = one;
    cl.d(2, s) = one;
    cl.d(0, s) = hh;
    cl.d(3, s) = hh;
  }
  for (int s : {1, 2}) {
    cl.d(0, s) = one;
    cl.d(3, s) = one;
    cl.d(1, s) = hh;
    cl.d(2, s) = hh;
  }
  REQUIRE(check_complex(cl).ok());
  auto hc = cohomology(cl);
  CHECK(hc.free_rank == 0);
  REQUIRE(hc.invariant_factors.size() == 1);
  CHECK(hc.invariant_factors[0] == HPoly::parse("1+h^2"));
  CHECK(hc.torsion_dim == 2);
}

TEST_CASE("tensor square with swap") {
  auto one = GradedComplex::make(Ring::GF2, Grading::Z, {{"x", 0, {}}});
  auto s1 = tensor_square_swap(one);
  CHECK(s1.complex.size() == 1);
  CHECK(s1.iota == BitMatrix::identity(1));

  auto two = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 0, {}}});
  auto s2 = tensor_square_swap(two);
  CHECK(s2.complex.size() == 4);
  int fixed = 0;
  for (int i = 0; i < 4; ++i) fixed += s2.iota.get(i, i);
  CHECK(fixed == 2);

  auto s3 = tensor_square_swap(two_step());
  CHECK(check_complex(s3.complex).ok());
  CHECK(cohomology(s3.complex).total == 0);

  auto g = testutil::rng(11);
  for (int t = 0; t < 50; ++t) {
    auto v = random_complex(g, 5);
    auto s = tensor_square_swap(v);
    BitMatrix d = BitMatrix::from_poly(s.complex.d);
    CHECK(check_complex(s.complex).ok());
    CHECK(s.iota * s.iota == BitMatrix::identity(s.complex.size()));
    CHECK(s.iota * d == d * s.iota);
    // Kunneth over a field
    int hv = cohomology(v).total;
    CHECK(cohomology(s.complex).total == hv * hv);
  }
}

TEST_CASE("random complexes satisfy the complex invariants") {
  auto g = testutil::rng(12);
  for (int t = 0; t < 100; ++t) {
    auto c = random_complex(g, 10, t % 3 == 0);
    CHECK(check_complex(c).ok());
    if (t % 3 == 0) CHECK(cohomology(c).total == 0);
  }
}

TEST_CASE("quasi-isomorphism check") {
  auto c = two_step();
  CHECK(quasi_iso_check(c, c, {PolyMatrix::identity(2), 0}).quasi_iso);
  auto zero = GradedComplex::make(Ring::GF2, Grading::Z, {});
  CHECK(quasi_iso_check(c, zero, {PolyMatrix(0, 2), 0}).quasi_iso);

  auto sub = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}});
  auto big = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 1, {}}});
  PolyMatrix inc(2, 1);
  inc(0, 0) = HPoly::one();
  auto r = quasi_iso_check(sub, big, {inc, 0});
  CHECK(r.chain_map);
  CHECK_FALSE(r.quasi_iso);
  CHECK(r.induced_rank == 1);

  // over GF(2)(h) and GF(2)[h]: h is invertible only in the field
  auto p = GradedComplex::make(Ring::Poly, Grading::Z2, {{"a", 0, {}}});
  PolyMatrix hmap(1, 1);
  hmap(0, 0) = HPoly::monomial(1);
  CHECK_FALSE(quasi_iso_check(p, p, {hmap, 0}).quasi_iso);
  p.ring = Ring::Frac;
  CHECK(quasi_iso_check(p, p, {hmap, 0}).quasi_iso);
}

TEST_CASE("spectral sequence: small cases") {
  auto c = two_step();
  auto ss = spectral_sequence(c, Filtration{{0, 1}});
  REQUIRE(ss.pages.size() >= 3);
  CHECK(ss.pages[0].total() == 2);
  CHECK(ss.pages[1].total() == 2);
  CHECK(ss.pages[1].d.at({0, 0}).get(0, 0));
  CHECK(ss.pages[2].total() == 0);
  CHECK(ss.consistent);
  CHECK(ss.abutment_matches);

  auto same = spectral_sequence(c, Filtration{{0, 0}});
  CHECK(same.pages[0].total() == 2);
  CHECK(same.pages[1].total() == 0);

  auto z = GradedComplex::make(Ring::GF2, Grading::Z, {{"a", 0, {}}, {"b", 1, {}}, {"c", 1, {}}});
  auto zs = spectral_sequence(z, Filtration{{2, 0, 1}});
  for (const auto& pg : zs.pages) {
    CHECK(pg.total() == 3);
    for (const auto& [k, m] : pg.d) CHECK(m.is_zero());
  }
  CHECK(zs.stable_page == 0);

  CHECK_THROWS_AS(spectral_sequence(c, Filtration{{1, 0}}), InputError);
}

TEST_CASE("spectral sequence: random filtered complexes") {
  auto g = testutil::rng(13);
  for (int t = 0; t < 150; ++t) {
    auto [c, f] = random_filtered(g, 10);
    auto ss = spectral_sequence(c, f);
    CHECK(ss.consistent);
    CHECK(ss.abutment_matches);
    CHECK(ss.e_infinity_total == cohomology(c).total);
  }
}
