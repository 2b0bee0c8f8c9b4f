#include <set>

#include "doctest.h"
#include "equihf/floermodel.hpp"
#include "equihf/io.hpp"
#include "test_util.hpp"

using namespace equihf;

namespace {

std::vector<FloerDatum> all_builtins() {
  std::vector<FloerDatum> out;
  for (int n = 1; n <= 3; ++n) {
    for (int i = 1; i <= 2 * n; ++i) out.push_back(builtin_example("morse_pair", i, n));
    for (int i = 2; i <= 2 * n - 1; ++i) out.push_back(builtin_example("twisted_pair", i, n));
  }
  for (const char* s : {"annulus", "clifford", "fixed_point"}) out.push_back(builtin_example(s));
  return out;
}

std::string failures(const ValidationReport& r) {
  std::string s;
  for (const auto& f : r.failures) s += f.check + ": " + f.detail + "\n";
  return s;
}

int index2(const FloerDatum& d, const std::string& name) {
  for (int k = 0; k < d.size2(); ++k)
    if (d.fix_phi2[k].name == name) return k;
  return -1;
}

}  // namespace

TEST_CASE("built-in data validate") {
  for (const auto& d : all_builtins()) {
    auto r = validate(d);
    INFO(d.name, "\n", failures(r));
    CHECK(r.ok());
    CHECK(r.checks.size() == 15);
  }
  CHECK_THROWS_AS(builtin_example("morse_pair", 3, 1), InputError);
  CHECK_THROWS_AS(builtin_example("twisted_pair", 1, 2), InputError);
  CHECK_THROWS_AS(builtin_example("torus"), InputError);
}

TEST_CASE("morse pair degrees and equivariant differential") {
  auto d = builtin_example("morse_pair", 1, 1);
  CHECK(d.fix_phi[0].degree == 0);
  CHECK(d.fix_phi[1].degree == 1);
  auto eq = equivariant_complex(d);
  CHECK(eq.d == d.d_phi2.to_poly());
  auto inv = floer_invariants(d);
  CHECK(inv.hf_poly.free_rank == 0);
  CHECK(inv.hf_poly_dim == 0);
  CHECK(inv.hf_eq == EqModuleInvariants{});
}

TEST_CASE("annulus") {
  auto d = builtin_example("annulus");
  CHECK(d.size2() == 4);
  auto eq = equivariant_complex(d);
  const int x = index2(d, "x"), z0 = index2(d, "z0"), z1 = index2(d, "z1"), y = index2(d, "y");
  // d_eq(x) = z0 + z1, d_eq(z0) = y + h(z0 + z1)
  CHECK(eq.d(z0, x).is_one());
  CHECK(eq.d(z1, x).is_one());
  CHECK(eq.d(x, x).is_zero());
  CHECK(eq.d(y, z0).is_one());
  CHECK(eq.d(z0, z0) == HPoly::monomial(1));
  CHECK(eq.d(z1, z0) == HPoly::monomial(1));
  CHECK(frac_rank(eq.d) == 2);
  auto inv = floer_invariants(d);
  CHECK(inv.hf_poly_dim == 0);
  CHECK(inv.hf_eq == EqModuleInvariants{});
  // diagonal exponents n - kappa = 1 for both fixed points
  CHECK(d.p(1, -1).get(x, pair_index(2, 0, 0)));
  CHECK(d.p(1, -1).get(y, pair_index(2, 1, 1)));
}

TEST_CASE("clifford torus") {
  auto d = builtin_example("clifford");
  CHECK(d.mode == FloerMode::Monotone);
  auto eq = equivariant_complex(d);
  const int mm = index2(d, "x--"), pp = index2(d, "x++"), mp = index2(d, "x-+"), pm = index2(d, "x+-");
  CHECK(eq.d(mp, mm).is_one());
  CHECK(eq.d(pm, mm).is_one());
  CHECK(eq.d(mm, mm) == HPoly::monomial(1));
  CHECK(eq.d(pp, mm) == HPoly::monomial(1));
  auto inv = floer_invariants(d);
  REQUIRE(inv.hf_poly.invariant_factors.size() == 1);
  CHECK(inv.hf_poly.invariant_factors[0] == HPoly::parse("h^2+1"));
  CHECK(inv.hf_poly_dim == 2);
  CHECK(inv.hf_eq == EqModuleInvariants{});
  for (int y = 0; y < 4; ++y) CHECK(d.rho[y] != y);

  TransferDecomposition t{{mm, mp}};
  auto tr = transfer(d, t);
  CHECK(tr.d_d.is_zero());
  CHECK(tr.dim_h == 2);
  CHECK(tr.hf_poly_dim == 2);
  CHECK(tr.free_orbits == 2);
  CHECK(tr.side_conditions.size() == 8);
  CHECK(tr.ok());
  CHECK(transfer(d).ok());
  CHECK_THROWS_AS(transfer(d, TransferDecomposition{{mm, pp}}), InputError);
  CHECK_THROWS_AS(transfer(builtin_example("annulus")), InputError);
}

TEST_CASE("transfer with only the Borel term") {
  auto d = builtin_example("clifford");
  d.d_phi2 = BitMatrix(4, 4);
  auto r = validate(d);
  CHECK(r.ok());
  auto tr = transfer(d);
  CHECK(tr.d_d.is_zero());
  CHECK(tr.dim_h == 2);
  CHECK(tr.side_conditions_hold());
  // H = (GF(2)[h]/h)^2
  CHECK(tr.hf_poly_dim == 2);
  CHECK(tr.ok());
}

TEST_CASE("pants chain map and localization") {
  for (const auto& d : all_builtins()) {
    INFO(d.name);
    auto pc = pants_chain_map(d);
    CHECK(pc.chain_map);
    auto l = localized_check(d);
    CHECK(l.ok());
    CHECK(l.e0_bijective);
    CHECK(l.e0_is_diagonal);
    CHECK(l.dim_source == l.dim_hf_phi);
  }
  auto fp = localized_check(builtin_example("fixed_point"));
  CHECK(fp.dim_hf_phi == 1);
  CHECK(fp.dim_target == 1);
}

TEST_CASE("zeroing a diagonal coefficient") {
  std::vector<FloerDatum> data;
  for (int n = 1; n <= 3; ++n)
    for (int i = 1; i <= 2 * n; ++i) data.push_back(builtin_example("morse_pair", i, n));
  data.push_back(builtin_example("annulus"));
  data.push_back(builtin_example("fixed_point"));
  for (const auto& base : data) {
    const auto emb = base.embedding();
    for (int k = 0; k < base.m(); ++k) {
      auto d = base;
      const int col = pair_index(d.m(), k, k);
      for (auto& [l, a] : d.pants) a.set(emb[k], col, false);
      INFO(base.name, " at ", base.fix_phi[k].name);
      auto r = validate(d);
      CHECK_FALSE(r.passed("krein"));
      auto l = localized_check(d);
      CHECK_FALSE(l.e0_bijective);
      CHECK_FALSE(l.ok());
      // The single fixed point has no partner to pair with; everywhere else the
      // relations themselves see the change.
      if (base.name != "fixed_point") {
        CHECK_FALSE(r.passed("p_relations"));
        CHECK_FALSE(r.passed("chain_map"));
      }
    }
  }
}

TEST_CASE("specific corruptions are named") {
  auto d = builtin_example("morse_pair", 1, 1);
  d.pants[{1, -1}].set(1, pair_index(2, 1, 1), false);
  auto r = validate(d);
  CHECK_FALSE(r.ok());
  bool named = false;
  for (const auto& f : r.failures) named = named || (f.check == "p_relations" && f.detail.find("(y; x, y)") != std::string::npos);
  CHECK(named);

  auto z = builtin_example("morse_pair", 1, 1);
  z.pants[{0, -1}] = BitMatrix(2, 4);
  z.pants[{0, -1}].set(0, 0, true);
  CHECK_FALSE(validate(z).passed("pants_zero"));

  auto g = builtin_example("annulus");
  g.fix_phi2[1].action = Action(1, 20);
  g.fix_phi2[2].action = Action(1, 20);
  CHECK_FALSE(validate(g).passed("action_gaps"));

  auto e = builtin_example("morse_pair", 1, 1);
  e.d_phi2 = BitMatrix(2, 2);
  e.d_phi2.set(0, 1, true);
  auto re = validate(e);
  CHECK_FALSE(re.passed("zero_energy"));
  CHECK_FALSE(re.passed("degrees"));

  auto k = builtin_example("annulus");
  k.fix_phi[0].krein = 1;
  CHECK_FALSE(validate(k).passed("krein"));
  auto s = builtin_example("annulus");
  s.fix_phi[1].detsign = 1;
  CHECK_FALSE(validate(s).passed("krein"));

  auto c = builtin_example("annulus");
  c.d_eq[{1, -1}] = BitMatrix::identity(4);
  auto rc = validate(c);
  CHECK_FALSE(rc.passed("zero_energy"));

  auto st = builtin_example("annulus");
  st.rho = {0, 1, 2, 3};
  CHECK_FALSE(validate(st).passed("rho"));
  st.rho = {1, 0};
  auto rs = validate(st);
  CHECK_FALSE(rs.passed("structure"));
  CHECK(rs.checks.size() == 1);
}

TEST_CASE("smith inequalities") {
  for (const auto& d : all_builtins()) {
    INFO(d.name);
    auto s = smith_check(d);
    CHECK(s.smith());
    CHECK(s.quantum_smith());
    CHECK(s.ok());
  }
  auto fp = smith_check(builtin_example("fixed_point"));
  CHECK(fp.invariant_dim == 1);
  CHECK(fp.generator_count == 1);
  CHECK(fp.free_rank == 1);
  CHECK(fp.hf_phi_dim == 1);
  auto an = smith_check(builtin_example("annulus"));
  CHECK(an.invariant_dim == 0);
  CHECK(an.generator_count == 0);
  CHECK(an.free_rank == 0);

  auto bad = builtin_example("annulus");
  bad.d_eq[{1, -1}].set(1, 0, true);
  CHECK_THROWS_AS(smith_check(bad), InputError);
}

TEST_CASE("spectral sequences of the built-in data") {
  for (const auto& d : all_builtins()) {
    INFO(d.name);
    for (int t : {2, 3, 5}) CHECK(e2_check(d, t).ok());
    auto te = tate_e1_check(d);
    CHECK(te.ok());
    CHECK(te.total == d.m());
  }
  CHECK_THROWS_AS(e2_check(builtin_example("annulus"), 1), InputError);
}

TEST_CASE("datum text round trip") {
  for (const auto& d : all_builtins()) {
    const std::string s = serialize_datum(d);
    auto back = parse_datum(s);
    CHECK(back == d);
    CHECK(serialize_datum(back) == s);
  }
  const std::string text = R"(# comment
name = tiny
n = 1
[phi]
x 0 0 krein=0 detsign=+1
[phi2]
x -1 0
[d_eq 1 +]
x -> x
[d_eq 1 -]
x -> x
[pants 1 -]
x x -> x
)";
  auto d = parse_datum(text);
  CHECK(d.name == "tiny");
  CHECK(d.d_phi2 == BitMatrix(1, 1));
  CHECK(d.rho == std::vector<int>{0});
  CHECK(validate(d).ok());
  CHECK_THROWS_WITH_AS(parse_datum("[phi]\nx 0\n"), doctest::Contains("line 2"), InputError);
  CHECK_THROWS_WITH_AS(parse_datum("[phi2]\nx 0 0\n[d_phi2]\nx -> y\n"), doctest::Contains("unknown generator"), InputError);
  CHECK_THROWS_AS(parse_datum("[phi2]\nx 0 0\n[d_phi2]\nx -> x x\n"), InputError);
  CHECK_THROWS_AS(parse_datum("[bogus]\n"), InputError);
  CHECK_THROWS_AS(parse_datum("mode = other\n"), InputError);
  CHECK_THROWS_AS(parse_datum("[phi2]\nx 0 1/0\n"), InputError);
  CHECK_THROWS_AS(parse_datum("[d_eq 0 +]\n"), InputError);
}

TEST_CASE("random valid data") {
  auto rng = testutil::rng(61);
  int with_fixed = 0, nontrivial_pants = 0;
  for (int t = 0; t < 60; ++t) {
    RandomDatumOptions opt;
    opt.max_generators = 2 + t % 5;
    auto d = random_valid_datum(rng, opt);
    auto r = validate(d);
    INFO(serialize_datum(d), failures(r));
    REQUIRE(r.ok());
    with_fixed += d.m() > 0;
    nontrivial_pants += !d.pants.empty();
    CHECK(parse_datum(serialize_datum(d)) == d);
    auto s = smith_check(d);
    CHECK(s.smith());
    CHECK(s.quantum_smith());
    CHECK(s.ok());
    CHECK(e2_check(d, 4).ok());
    CHECK(tate_e1_check(d).ok());
    auto l = localized_check(d);
    CHECK(l.ok() == l.e0_bijective);
    CHECK(l.ok());
    CHECK(l.e0_is_diagonal);
    auto inv = floer_invariants(d);
    CHECK(inv.consistent);
  }
  CHECK(with_fixed > 30);
  CHECK(nontrivial_pants > 30);
}

TEST_CASE("transfer on random free data") {
  auto rng = testutil::rng(62);
  for (int t = 0; t < 40; ++t) {
    RandomDatumOptions opt;
    opt.free = true;
    opt.max_generators = 2 + t % 5;
    auto d = random_valid_datum(rng, opt);
    REQUIRE(validate(d).ok());
    auto tr = transfer(d);
    INFO(serialize_datum(d));
    CHECK(tr.side_conditions_hold());
    CHECK(tr.dim_h == tr.hf_poly_dim);
    CHECK(tr.dim_h <= tr.free_orbits);
    CHECK(tr.ok());
    CHECK(floer_invariants(d).hf_eq.free_rank == 0);
  }
}
