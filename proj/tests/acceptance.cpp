// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "equihf/equivariant.hpp"
#include "equihf/floermodel.hpp"
#include "equihf/morseflow.hpp"
#include "equihf/random.hpp"
#include "equihf/symplinalg.hpp"
#include "test_util.hpp"

using namespace equihf;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (pass) detail = what;
    pass = false;
  }
};

std::vector<FloerDatum> localization_data() {
  std::vector<FloerDatum> out;
  for (int n = 1; n <= 3; ++n) {
    for (int i = 1; i <= 2 * n; ++i) out.push_back(builtin_example("morse_pair", i, n));
    for (int i = 2; i <= 2 * n - 1; ++i) out.push_back(builtin_example("twisted_pair", i, n));
  }
  out.push_back(builtin_example("annulus"));
  return out;
}

std::vector<FloerDatum> all_builtins() {
  auto out = localization_data();
  out.push_back(builtin_example("clifford"));
  out.push_back(builtin_example("fixed_point"));
  return out;
}

std::string label(const FloerDatum& d) { return d.name; }

Outcome clifford_invariants() {
  Outcome o;
  const auto d = builtin_example("clifford");
  const auto inv = floer_invariants(d);
  o.require(inv.hf_poly.invariant_factors.size() == 1 && inv.hf_poly.invariant_factors[0] == HPoly::parse("h^2+1"),
            "hf_poly invariant factors are not {h^2+1}");
  o.require(inv.hf_poly.free_rank == 0, "hf_poly has free part");
  o.require(inv.hf_poly_dim == 2, "hf_poly dimension " + std::to_string(inv.hf_poly_dim));
  o.require(inv.hf_eq == EqModuleInvariants{}, "hf_eq is not zero");
  return o;
}

Outcome clifford_transfer() {
  Outcome o;
  const auto d = builtin_example("clifford");
  const auto tr = transfer(d);
  const auto inv = floer_invariants(d);
  o.require(tr.side_conditions_hold(), "transfer side conditions fail");
  o.require(tr.d_d.is_zero(), "d_D is not zero");
  o.require(tr.dim_h == 2, "dim H(D) = " + std::to_string(tr.dim_h));
  o.require(tr.dim_h == inv.hf_poly_dim, "dim H(D) differs from hf_poly dimension");
  o.require(tr.free_orbits <= 2 && tr.dim_h <= tr.free_orbits, "orbit bound fails");
  return o;
}

Outcome localization() {
  Outcome o;
  int zeroed = 0;
  for (const auto& base : localization_data()) {
    const auto l = localized_check(base);
    o.require(l.ok() && l.bijective, label(base) + ": localization fails");
    const auto emb = base.embedding();
    for (int k = 0; k < base.m(); ++k) {
      auto d = base;
      const int col = pair_index(d.m(), k, k);
      for (auto& [lvl, a] : d.pants) a.set(emb[k], col, false);
      o.require(!localized_check(d).ok(), label(base) + ": still localizes with zeroed diagonal at " + base.fix_phi[k].name);
      ++zeroed;
    }
  }
  o.detail = o.pass ? std::to_string(zeroed) + " zeroed diagonals detected" : o.detail;
  return o;
}

// Flipping one diagonal coefficient c_{s,k} breaks its equality with the
// partners c_{-s,k+1}, c_{-s,k-1} and c_{-s,k}.
Outcome coefficient_identities() {
  Outcome o;
  int flips = 0;
  for (const auto& base : localization_data()) {
    const auto emb = base.embedding();
    const int top = base.max_p_level();
    for (int x = 0; x < base.m(); ++x)
      for (int k = 0; k <= top; ++k)
        for (int s : {1, -1}) {
          if (k == 0 && s == -1) continue;
          auto d = base;
          const int col = pair_index(d.m(), x, x);
          BitMatrix p = d.p(k, s);
          p.set(emb[x], col, !p.get(emb[x], col));
          d.pants[{k, s}] = p;
          const auto r = validate(d);
          const bool seen = !r.passed("p_relations") || !r.passed("chain_map");
          o.require(!r.ok() && seen, label(base) + ": flip of c at (" + std::to_string(s) + "," + std::to_string(k) +
                                          ") on " + base.fix_phi[x].name + " not rejected");
          ++flips;
        }
  }
  if (o.pass) o.detail = std::to_string(flips) + " single-coefficient flips rejected";
  return o;
}

Outcome krein_cz() {
  Outcome o;
  auto g = testutil::rng(501);
  std::normal_distribution<double> nd(0, 1);
  int sums = 0;
  for (int n = 1; n <= 3; ++n)
    for (int t = 0; t < 100; ++t) {
      const auto bs = random_blocks(g, n);
      const RMat a = build_blocks(bs);
      const auto r = verify_cz_krein(bs);
      o.require(r.n == n, "wrong half dimension");
      o.require(r.holds(), "kappa - n != mu(A^2) - 2 mu(A) for " + [&] {
        std::string s;
        for (const auto& b : bs) s += block_str(b) + ";";
        return s;
      }());
      const int kpar = r.kappa % 2 == 0 ? 1 : -1;
      o.require(kpar == (n % 2 == 0 ? 1 : -1) * sign_det_i_minus(a * a), "kappa parity law fails");
      const int mpar = r.mu % 2 == 0 ? 1 : -1;
      o.require(mpar == sign_det_i_minus(a), "mu parity law fails");
      ++sums;
    }
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 3;
    const RMat a = build_blocks(random_blocks(g, n));
    RMat s(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = nd(g);
    const RMat pert = a * RMat(1e-6 * hamiltonian_from_form(s)).exp();
    o.require(krein_index(pert).kappa == krein_index(a).kappa, "kappa jumps under a 1e-6 perturbation");
  }
  if (o.pass) o.detail = std::to_string(sums) + " block sums, 100 perturbations";
  return o;
}

Outcome components() {
  Outcome o;
  int admissible = 0, rejected = 0;
  for (int n = 1; n <= 4; ++n)
    for (int s : {-1, 1})
      for (int k = -n - 2; k <= n + 2; ++k) {
        if (admissible_component(s, k, n)) {
          o.require(component_invariant(representative_for(s, k, n)) == ComponentInvariant{s, k},
                    "round trip fails at (" + std::to_string(s) + "," + std::to_string(k) + "), n=" + std::to_string(n));
          ++admissible;
        } else {
          bool threw = false;
          try {
            representative_for(s, k, n);
          } catch (const InputError&) {
            threw = true;
          }
          o.require(threw, "inadmissible pair accepted");
          ++rejected;
        }
      }
  if (o.pass) o.detail = std::to_string(admissible) + " admissible, " + std::to_string(rejected) + " rejected";
  return o;
}

Outcome morse_combinatorics() {
  Outcome o;
  for (int i = 1; i <= 8; ++i) {
    const long long formula = (1LL << (i - 1)) * (i + 1);
    o.require(corner_count(i) == formula, "corner_count(" + std::to_string(i) + ")");
    for (int sg : {1, -1}) {
      o.require(static_cast<long long>(enumerate_strata(SpaceKind::P, i, sg, i).size()) == formula,
                "enumerated corners differ at i=" + std::to_string(i));
      o.require(static_cast<int>(codim1_faces(i, sg).size()) == 4 * i - 2,
                "codim-1 face count differs at i=" + std::to_string(i));
    }
  }
  o.require(relation_rhs(1, 1) == "p^{0,+} + d_eq^{1,+} . p^{0,+}", "relation (1,+)");
  o.require(relation_rhs(1, -1) == "p^{0,+} . swap + d_eq^{1,-} . p^{0,+}", "relation (1,-)");
  o.require(relation_rhs(2, 1) ==
                "p^{1,+} + p^{1,-} . swap + d_eq^{1,+} . p^{1,+} + d_eq^{1,-} . p^{1,-} + d_eq^{2,+} . p^{0,+}",
            "relation (2,+)");
  return o;
}

Outcome equivariant_suite() {
  Outcome o;
  auto g = testutil::rng(801);
  for (int k = 0; k < 200; ++k) {
    const auto free = random_involutive(g, 8, InvolutionKind::LevelwiseFree);
    o.require(tate_dimension(free) == 0, "Tate cohomology of a levelwise free complex is nonzero");
    const auto acyc = random_involutive(g, 8, InvolutionKind::Acyclic);
    o.require(cohomology(acyc.complex).total == 0 && group_cohomology(acyc) == EqModuleInvariants{},
              "acyclic complex with nonzero group cohomology");
    const auto w = random_involutive(g, 8);
    const auto sb = smith_bound_check(w);
    o.require(sb.holds(), "generator bound fails");
    o.require(sb.generator_count == group_cohomology(w).generator_count, "generator counts disagree");
    o.require(verify_u_sequence(w, 2 + k % 4).exact(), "h-sequence not exact");
  }
  for (int k = 0; k < 200; ++k)
    o.require(kaledin_check(random_complex(g, 6)).bijective(), "squaring map not bijective");
  return o;
}

Outcome spectral_sequences() {
  Outcome o;
  for (const auto& d : all_builtins()) {
    for (int t : {2, 3, 4, 5}) o.require(e2_check(d, t).ok(), label(d) + ": E2 mismatch at truncation " + std::to_string(t));
    const auto te = tate_e1_check(d);
    o.require(te.ok() && te.total == d.m(), label(d) + ": Tate E1 dimension " + std::to_string(te.total));
  }
  return o;
}

Outcome smith() {
  Outcome o;
  for (const auto& d : all_builtins()) o.require(smith_check(d).ok(), label(d) + ": Smith inequality fails");
  auto g = testutil::rng(1001);
  RandomDatumOptions opt;
  opt.max_generators = 6;
  for (int k = 0; k < 100; ++k) {
    const auto d = random_valid_datum(g, opt);
    const auto s = smith_check(d);
    o.require(s.smith() && s.quantum_smith(), "random datum " + std::to_string(k) + ": Smith inequality fails");
  }
  if (o.pass) o.detail = std::to_string(all_builtins().size()) + " built-in, 100 random";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "clifford invariants", 1, clifford_invariants},
      {2, "clifford transfer", 1, clifford_transfer},
      {3, "localization instances", 5, localization},
      {4, "diagonal coefficient identities", 0, coefficient_identities},
      {5, "krein / conley-zehnder", 10, krein_cz},
      {6, "component classification", 0, components},
      {7, "morse combinatorics", 1, morse_combinatorics},
      {8, "equivariant algebra properties", 30, equivariant_suite},
      {9, "spectral sequence cross-check", 0, spectral_sequences},
      {10, "smith inequalities", 0, smith},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      if (o.pass) o.detail = "over time budget";
      o.pass = false;
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s) %.3fs%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
