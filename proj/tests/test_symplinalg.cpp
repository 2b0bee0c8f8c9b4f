#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "equihf/symplinalg.hpp"
#include "test_util.hpp"

using namespace equihf;

namespace {

constexpr double kPi = std::numbers::pi;

RMat mat2(double a, double b, double c, double d) {
  RMat m(2, 2);
  m << a, b, c, d;
  return m;
}

RMat rot2(double t) { return mat2(std::cos(t), -std::sin(t), std::sin(t), std::cos(t)); }

double maxabs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

RMat conjugate_random(const RMat& a, std::mt19937_64& g) {
  RMat p = random_symplectic(g, static_cast<int>(a.rows() / 2));
  return p * a * p.inverse();
}

int count_kind(const std::vector<BlockSpec>& bs, BlockKind k) {
  int c = 0;
  for (const auto& b : bs) c += b.kind == k;
  return c;
}

int half_dim(const std::vector<BlockSpec>& bs) {
  int n = 0;
  for (const auto& b : bs) n += block_half_dim(b);
  return n;
}

}  // namespace

TEST_CASE("membership") {
  auto id = membership(RMat::Identity(2, 2));
  CHECK(id.sp);
  CHECK_FALSE(id.star);
  auto d = membership(mat2(0.5, 0, 0, 2));
  CHECK(d.starstar);
  auto r = membership(rot2(kPi));
  CHECK(r.star);
  CHECK_FALSE(r.starstar);
  CHECK_THROWS_AS(membership(mat2(2, 0, 0, 2)), InputError);
  CHECK_THROWS_AS(membership(RMat::Identity(3, 3)), InputError);
}

TEST_CASE("quadratic forms and Hamiltonian matrices") {
  RMat s = parse_quadratic_form("p^2 + q^2");
  CHECK(maxabs(s - RMat::Identity(2, 2)) == 0);
  RMat b = hamiltonian_from_form(s);
  CHECK(maxabs(b - mat2(0, -1, 1, 0)) == 0);  // anticlockwise
  RMat pq = parse_quadratic_form("pq");
  CHECK(maxabs(pq - mat2(0, 0.5, 0.5, 0)) == 0);
  CHECK(maxabs(hamiltonian_from_form(pq) - mat2(-0.5, 0, 0, 0.5)) == 0);
  CHECK(is_hamiltonian(hamiltonian_from_form(pq)));
  CHECK(maxabs(form_from_hamiltonian(hamiltonian_from_form(pq)) - pq) < 1e-15);

  RMat m = parse_quadratic_form("2*p1*q1 - q2^2 + 0.5 p2 q1", 3);
  CHECK(m.rows() == 6);
  CHECK(m(0, 1) == 1);
  CHECK(m(3, 3) == -1);
  CHECK(m(2, 1) == 0.25);
  CHECK_THROWS_AS(parse_quadratic_form("p^3"), InputError);
  CHECK_THROWS_AS(parse_quadratic_form("p + q"), InputError);
  CHECK_THROWS_AS(parse_quadratic_form(""), InputError);

  CHECK(morse_index(parse_quadratic_form("p^2+q^2")) == 0);
  CHECK(morse_index(parse_quadratic_form("pq")) == 1);
  CHECK(morse_index(parse_quadratic_form("-p^2-q^2")) == 2);
  CHECK_THROWS_AS(morse_index(parse_quadratic_form("p^2", 1)), InputError);
}

TEST_CASE("Cayley transform") {
  RMat a = cayley(mat2(2, 0, 0, -2));
  CHECK(maxabs(a - mat2(3, 0, 0, 1.0 / 3)) < 1e-12);
  CHECK(maxabs(cayley_inv(a) - mat2(2, 0, 0, -2)) < 1e-9);
  CHECK_THROWS_AS(cayley(mat2(1, 0, 0, -1)), InputError);
  CHECK_THROWS_AS(cayley(mat2(0, 1, 0, 0) * 0.0), InputError);

  auto g = testutil::rng(41);
  std::normal_distribution<double> nd(0, 1);
  int done = 0;
  for (int t = 0; t < 200 && done < 60; ++t) {
    const int n = 1 + t % 3;
    RMat s(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = nd(g);
    RMat bm = hamiltonian_from_form(s);
    Eigen::EigenSolver<RMat> es(bm, false);
    bool ok = true;
    for (auto l : es.eigenvalues()) ok = ok && std::abs(l) > 0.1 && std::abs(l - 1.0) > 0.1 && std::abs(l + 1.0) > 0.1;
    if (!ok) continue;
    ++done;
    RMat am = cayley(bm);
    CHECK(membership(am).starstar);
    CHECK(maxabs(cayley_inv(am) - bm) < 1e-9);
    // spectrum of A is (l+1)/(l-1) of the spectrum of B
    Eigen::EigenSolver<RMat> ea(am, false);
    for (auto l : es.eigenvalues()) {
      auto mu = (l + 1.0) / (l - 1.0);
      double best = INFINITY;
      for (auto x : ea.eigenvalues()) best = std::min(best, std::abs(x - mu));
      CHECK(best < 1e-8 * std::max(1.0, std::abs(mu)));
    }
  }
  CHECK(done >= 30);
}

TEST_CASE("Krein index of small examples") {
  for (double t : {0.3, 1.0, 2.5}) CHECK(krein_index(rot2(t)).kappa == 1);
  CHECK(krein_index(rot2(-1.0)).kappa == -1);
  CHECK(krein_index(mat2(0.5, 0, 0, 2)).kappa == 0);
  CHECK(krein_index(mat2(0.5, 0, 0, 2)).e_dim == 0);
  auto pm = krein_index(direct_sum({rot2(1.1), rot2(-1.1)}));
  CHECK(pm.kappa == 0);
  CHECK(pm.e_dim == 2);
  CHECK_THROWS_AS(krein_index(rot2(kPi)), InputError);

  // the form on E for a (ii+) block: h = (1, -i), <h,h> = i omega(conj h, h) = 2
  std::complex<double> i(0, 1);
  Eigen::Vector2cd h(1, -i);
  auto val = i * (h.conjugate().transpose() * standard_j(1).cast<std::complex<double>>() * h)(0, 0);
  CHECK(std::abs(val - 2.0) < 1e-15);
  auto r = krein_index(build_block({BlockKind::IIPlus, 0, 0, 1}));
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].signature == 1);
  CHECK(std::abs(r.clusters[0].eigenvalue - i) < 1e-12);
}

TEST_CASE("block normal forms") {
  RMat ii = build_block(parse_block("ii+:a1=0,a2=1"));
  CHECK(maxabs(ii - rot2(kPi / 2)) < 1e-15);
  CHECK(std::abs((RMat::Identity(2, 2) - ii).determinant() - 2) < 1e-15);
  CHECK(sign_det_i_minus(build_block(parse_block("i+:a=0.5"))) == -1);
  CHECK(sign_det_i_minus(build_block(parse_block("i-:a=-0.5"))) == 1);

  RMat iii = build_block(parse_block("iii:a1=0.4,a2=0"));
  RMat two = build_blocks(parse_blocks("i+:a=0.4; i+:a=0.4"));
  CHECK(maxabs(iii - two) < 1e-15);

  auto g = testutil::rng(42);
  for (int t = 0; t < 30; ++t)
    for (const auto& b : random_blocks(g, 4)) CHECK(symplectic_residual(build_block(b)) < 1e-12);

  CHECK_THROWS_AS(parse_block("i+:a=1.5"), InputError);
  CHECK_THROWS_AS(parse_block("i-:a=0.5"), InputError);
  CHECK_THROWS_AS(parse_block("ii+:a1=0,a2=-1"), InputError);
  CHECK_THROWS_AS(parse_block("ii+:a1=0.5,a2=0.5"), InputError);
  CHECK_THROWS_AS(parse_block("iii:a1=1,a2=0"), InputError);
  CHECK_THROWS_AS(parse_block("iii:a1=0.9,a2=0.9"), InputError);
  CHECK_THROWS_AS(parse_block("iv:a=1"), InputError);
  CHECK(parse_block("ii-:theta=-1").a2 < 0);
  auto rt = parse_block(block_str(parse_block("iii:a1=0.3,a2=-0.2")));
  CHECK(rt.a1 == 0.3);
  CHECK(rt.a2 == -0.2);
}

TEST_CASE("Krein index of semisimple matrices counts (ii) blocks") {
  auto g = testutil::rng(43);
  for (int t = 0; t < 100; ++t) {
    auto bs = random_blocks(g, 1 + t % 4);
    RMat a = conjugate_random(build_blocks(bs), g);
    auto r = krein_index(a);
    CHECK(r.kappa == count_kind(bs, BlockKind::IIPlus) - count_kind(bs, BlockKind::IIMinus));
    CHECK(std::abs(r.kappa) <= r.e_dim);
    CHECK(r.e_dim <= half_dim(bs));
    CHECK((r.e_dim - r.kappa) % 2 == 0);
  }
}

TEST_CASE("Krein index: local constancy, parity, additivity") {
  auto g = testutil::rng(44);
  std::normal_distribution<double> nd(0, 1);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 3;
    auto bs = random_blocks(g, n);
    RMat a = conjugate_random(build_blocks(bs), g);
    RMat s(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = nd(g);
    RMat pert = a * RMat(1e-6 * hamiltonian_from_form(s)).exp();
    CHECK(symplectic_residual(pert) < 1e-9);
    const int k = krein_index(a).kappa;
    CHECK(krein_index(pert).kappa == k);
    const int parity = (k % 2 == 0) ? 1 : -1;
    CHECK(parity == ((n % 2 == 0) ? 1 : -1) * sign_det_i_minus(a * a));

    auto bs2 = random_blocks(g, 1 + t % 2);
    RMat b = build_blocks(bs2);
    CHECK(krein_index(direct_sum({a, b})).kappa == k + krein_index(b).kappa);
  }
}

TEST_CASE("Krein index of exp(tB) is n - i(Q)") {
  auto g = testutil::rng(45);
  std::normal_distribution<double> nd(0, 1);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4;
    RMat s(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = nd(g);
    Eigen::SelfAdjointEigenSolver<RMat> es(s);
    if (es.eigenvalues().cwiseAbs().minCoeff() < 0.05) continue;
    RMat a = RMat(0.01 * hamiltonian_from_form(s)).exp();
    CHECK(krein_index(a).kappa == n - morse_index(s));
  }
}

TEST_CASE("component invariant and representatives") {
  CHECK(component_invariant(representative_for(1, 1, 1)) == ComponentInvariant{1, 1});
  CHECK(component_invariant(representative_for(-1, 0, 1)) == ComponentInvariant{-1, 0});
  // n = 1: (i+), (i-), (ii+), (ii-)
  CHECK(component_invariant(build_block(parse_block("i+:a=0.3"))) == ComponentInvariant{-1, 0});
  CHECK(component_invariant(build_block(parse_block("i-:a=-0.3"))) == ComponentInvariant{1, 0});
  CHECK(component_invariant(build_block(parse_block("ii+:theta=2"))) == ComponentInvariant{1, 1});
  CHECK(component_invariant(build_block(parse_block("ii-:theta=-2"))) == ComponentInvariant{1, -1});

  for (int n = 1; n <= 4; ++n)
    for (int s : {-1, 1})
      for (int k = -n - 2; k <= n + 2; ++k) {
        if (admissible_component(s, k, n)) {
          auto bs = representative_blocks(s, k, n);
          CHECK(half_dim(bs) == n);
          CHECK(component_invariant(build_blocks(bs)) == ComponentInvariant{s, k});
        } else {
          CHECK_THROWS_AS(representative_for(s, k, n), InputError);
        }
      }
  CHECK_THROWS_AS(representative_for(-1, 3, 3), InputError);
  CHECK_FALSE(admissible_component(-1, 1, 1));
  CHECK(admissible_component(1, -1, 1));
}

TEST_CASE("component invariant is conjugation invariant and bounded") {
  auto g = testutil::rng(46);
  for (int t = 0; t < 80; ++t) {
    const int n = 1 + t % 4;
    RMat a = build_blocks(random_blocks(g, n));
    auto c = component_invariant(a);
    CHECK(admissible_component(c.sign, c.kappa, n));
    CHECK(component_invariant(conjugate_random(a, g)) == c);
  }
}

TEST_CASE("Conley-Zehnder index of basic lifts") {
  CHECK(conley_zehnder(parse_path("exp(p^2+q^2, 0.01)")) == 0);
  CHECK(conley_zehnder(parse_path("exp(-p^2-q^2, 0.01)")) == 2);
  CHECK(conley_zehnder(parse_path("exp(pq, 0.01)")) == 1);
  CHECK(conley_zehnder(parse_path("cat(rot(1, 3.14159265358979), exp(pq, 0.01))")) == 0);
  CHECK(conley_zehnder(parse_path("cat(rot(1, pi), exp(pq, 0.01))")) == 0);
  CHECK(conley_zehnder(parse_path("loop(1, exp(pq, 0.01))")) == -1);
  CHECK(conley_zehnder(parse_path("loop(-2, exp(p^2+q^2, 0.01))")) == 4);
  CHECK(conley_zehnder(parse_path("rot(1, pi/2)")) == 0);
  CHECK(conley_zehnder(parse_path("rot(1, 2*pi + 0.5)")) == -2);
  CHECK(conley_zehnder(parse_path("rot(1, -0.5)")) == 2);
  // rotated example with extra variables: mu = i(Q) - 1
  CHECK(conley_zehnder(parse_path("cat(rot(1, pi, 2), exp(p1 q1 - p2^2 - q2^2, 0.01))")) == 2);
  CHECK(conley_zehnder(parse_path("sum(exp(pq, 0.1), exp(-p^2-q^2, 0.1))")) == 3);
  // continuation in the rotation angle
  CHECK(conley_zehnder(parse_path("cat(rot(1, 0.75*pi), exp(pq, 0.1))")) == 0);
  CHECK_THROWS_AS(conley_zehnder(parse_path("cat(rot(1, 0.01), exp(pq, 0.1))")), NumericError);
  // an exp arc winding past 2 pi crosses eigenvalue 1
  CHECK_THROWS_AS(conley_zehnder(parse_path("exp(p^2+q^2, 7)")), NumericError);
  CHECK_THROWS_AS(conley_zehnder(parse_path("rot(1, 0.5, 2)")), InputError);
  CHECK_THROWS_AS(conley_zehnder(parse_path("rot(1, 0)")), InputError);
  CHECK_THROWS_AS(parse_path("exp(pq)"), InputError);
  CHECK_THROWS_AS(parse_path("foo(1)"), InputError);
}

TEST_CASE("path expressions: printing, squaring, evaluation") {
  auto p = parse_path("sum(cat(rot(1, pi), exp([[0,0.7],[0.7,0]], 1)), loop(2, exp(p^2+q^2, 0.3)))");
  auto q = parse_path(path_str(p));
  CHECK(path_str(q) == path_str(p));
  CHECK(maxabs(evaluate(p) - evaluate(q)) == 0);
  CHECK(p.half_dim() == 2);
  auto sq = square(p);
  CHECK(maxabs(evaluate(sq) - evaluate(p) * evaluate(p)) < 1e-12);
  CHECK_THROWS_AS(square(parse_path("cat(rot(1, 2), exp(pq, 1))")), InputError);
}

TEST_CASE("Krein and Conley-Zehnder indices agree") {
  auto minus = verify_cz_krein(parse_blocks("i-:a=-0.5"));
  CHECK(minus.kappa - minus.n == -1);
  CHECK(minus.mu == 0);
  CHECK(minus.mu_square == -1);
  CHECK(minus.holds());
  auto plus = verify_cz_krein(parse_blocks("ii+:theta=0.01"));
  CHECK(plus.kappa - plus.n == 0);
  CHECK(plus.mu == 0);
  CHECK(plus.mu_square == 0);
  CHECK(plus.holds());
  for (const char* s : {"i+:a=0.2", "ii-:theta=-2.5", "ii+:theta=3", "iii:a1=0.3,a2=0.5", "iii:a1=-0.5,a2=0.1",
                        "iii:a1=-0.5,a2=0", "iii:a1=0.6,a2=0.8"})
    CHECK_MESSAGE(verify_cz_krein(parse_blocks(s)).holds(), s);
  CHECK(verify_cz_krein(parse_blocks("iii:a1=0.3,a2=0.5")).mu == 2);

  auto g = testutil::rng(47);
  std::uniform_int_distribution<int> nb(1, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<BlockSpec> bs;
    const int k = nb(g);
    while (static_cast<int>(bs.size()) < k) {
      auto more = random_blocks(g, 1 + t % 2);
      bs.push_back(more[0]);
    }
    if (half_dim(bs) > 3) bs.resize(1);
    auto r = verify_cz_krein(bs);
    CHECK(r.holds());
    CHECK(r.lift_residual < 1e-10);
    // parity law for mu
    CHECK(((r.mu % 2 == 0) ? 1 : -1) == sign_det_i_minus(build_blocks(bs)));
  }
}

TEST_CASE("Krein-CZ relation is insensitive to the lift") {
  auto g = testutil::rng(48);
  for (int t = 0; t < 30; ++t) {
    auto bs = random_blocks(g, 1 + t % 3);
    auto lift = blocks_lift(bs);
    auto base = verify_cz_krein(build_blocks(bs), lift);
    auto shifted = verify_cz_krein(build_blocks(bs), PathExpr::loop(1 + t % 3, lift));
    CHECK(base.holds());
    CHECK(shifted.holds());
    CHECK(shifted.mu == base.mu - 2 * (1 + t % 3));
  }
}
