#include "equihf/floermodel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "equihf/io.hpp"
#include "equihf/symplinalg.hpp"

namespace equihf {

std::string mode_name(FloerMode m) { return m == FloerMode::Exact ? "exact" : "monotone"; }

int FloerDatum::max_d_level() const {
  int l = 0;
  for (const auto& [k, v] : d_eq) l = std::max(l, k.first);
  return l;
}

int FloerDatum::max_p_level() const {
  int l = 0;
  for (const auto& [k, v] : pants) l = std::max(l, k.first);
  return l;
}

BitMatrix FloerDatum::deq(int i, int sigma) const {
  auto it = d_eq.find({i, sigma});
  return it == d_eq.end() ? BitMatrix(size2(), size2()) : it->second;
}

BitMatrix FloerDatum::p(int i, int sigma) const {
  auto it = pants.find({i, sigma});
  return it == pants.end() ? BitMatrix(size2(), m() * m()) : it->second;
}

BitMatrix FloerDatum::rho_matrix() const {
  BitMatrix r(size2(), size2());
  for (int s = 0; s < size2(); ++s) r.set(rho[s], s, true);
  return r;
}

std::vector<int> FloerDatum::embedding() const {
  std::vector<int> e;
  for (const auto& x : fix_phi) {
    int idx = -1;
    for (int k = 0; k < size2(); ++k)
      if (fix_phi2[k].name == x.name) idx = k;
    e.push_back(idx);
  }
  return e;
}

bool ValidationReport::passed(const std::string& check) const {
  for (const auto& [name, ok] : checks)
    if (name == check) return ok;
  return false;
}

namespace {

int mod2(int k) { return ((k % 2) + 2) % 2; }

bool deg_eq(Grading g, int a, int b) { return g == Grading::Z ? a == b : mod2(a - b) == 0; }

std::string sgn(int s) { return s > 0 ? "+" : "-"; }

std::string level_name(const std::string& base, int i, int s) {
  return base + "^{" + std::to_string(i) + "," + sgn(s) + "}";
}

// Energy of an h^i-entry from source action to target action.
Action energy(FloerMode mode, const Action& target, const Action& source, int i) {
  return mode == FloerMode::Exact ? target - source : target - source + Action(1 - i);
}

PolyMatrix scaled(const BitMatrix& m, int k) {
  PolyMatrix p(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m.get(r, c)) p(r, c) = HPoly::monomial(k);
  return p;
}

struct SwapSquare {
  BitMatrix t;  // d (x) 1 + 1 (x) d on CF(phi) (x) CF(phi)
  BitMatrix s;  // factor swap
};

SwapSquare swap_square(const FloerDatum& d) {
  auto w = tensor_square_swap(cf_phi(d));
  return {BitMatrix::from_poly(w.complex.d), w.iota};
}

BitMatrix d_residual(const FloerDatum& d, const BitMatrix& d2, int i, int sigma) {
  const BitMatrix di = d.deq(i, sigma);
  BitMatrix r = d2 * di + di * d2;
  for (int i1 = 1; i1 < i; ++i1) {
    if (sigma > 0) r = r + d.deq(i1, 1) * d.deq(i - i1, 1) + d.deq(i1, -1) * d.deq(i - i1, -1);
    else r = r + d.deq(i1, -1) * d.deq(i - i1, 1) + d.deq(i1, 1) * d.deq(i - i1, -1);
  }
  return r;
}

BitMatrix p_residual(const FloerDatum& d, const BitMatrix& d2, const SwapSquare& sq, int i, int sigma) {
  const BitMatrix pi = d.p(i, sigma);
  BitMatrix r = d2 * pi + pi * sq.t;
  if (i >= 1) r = r + d.p(i - 1, sigma) + d.p(i - 1, -sigma) * sq.s;
  for (int i1 = 1; i1 <= i; ++i1) r = r + d.deq(i1, 1) * d.p(i - i1, sigma) + d.deq(i1, -1) * d.p(i - i1, -sigma);
  return r;
}

class Checker {
 public:
  explicit Checker(ValidationReport& r) : r_(r) {}
  void begin(const std::string& name) {
    name_ = name;
    count_ = 0;
  }
  void fail(const std::string& detail) {
    if (count_ == kMax) r_.failures.push_back({name_, "further violations omitted"});
    if (count_++ < kMax) r_.failures.push_back({name_, detail});
  }
  bool end() {
    r_.checks.push_back({name_, count_ == 0});
    return count_ == 0;
  }

 private:
  static constexpr int kMax = 12;
  ValidationReport& r_;
  std::string name_;
  int count_ = 0;
};

bool structure_check(const FloerDatum& d, Checker& c) {
  c.begin("structure");
  const int m = d.m(), N = d.size2();
  auto dims = [&](const BitMatrix& a, int r, int k, const std::string& what) {
    if (a.rows() != r || a.cols() != k)
      c.fail(what + " is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", expected " +
             std::to_string(r) + "x" + std::to_string(k));
  };
  dims(d.d_phi, m, m, "d_phi");
  dims(d.d_phi2, N, N, "d_phi2");
  for (const auto& [l, a] : d.d_eq) {
    if (l.first < 1 || (l.second != 1 && l.second != -1)) c.fail("bad d_eq level " + level_name("d_eq", l.first, l.second));
    dims(a, N, N, level_name("d_eq", l.first, l.second));
  }
  for (const auto& [l, a] : d.pants) {
    if (l.first < 0 || (l.second != 1 && l.second != -1)) c.fail("bad pants level " + level_name("p", l.first, l.second));
    dims(a, N, m * m, level_name("p", l.first, l.second));
  }
  if (d.n < 0) c.fail("n must be non-negative");
  if (d.epsilon <= Action(0)) c.fail("epsilon must be positive");
  std::set<std::string> seen1, seen2;
  for (const auto& x : d.fix_phi) {
    if (!seen1.insert(x.name).second) c.fail("duplicate fixed point " + x.name);
    if (x.detsign && *x.detsign != 1 && *x.detsign != -1) c.fail("detsign of " + x.name + " must be +1 or -1");
  }
  for (const auto& y : d.fix_phi2)
    if (!seen2.insert(y.name).second) c.fail("duplicate periodic point " + y.name);
  if (static_cast<int>(d.rho.size()) != N) {
    c.fail("rho has " + std::to_string(d.rho.size()) + " entries for " + std::to_string(N) + " periodic points");
  } else {
    for (int k = 0; k < N; ++k)
      if (d.rho[k] < 0 || d.rho[k] >= N || d.rho[d.rho[k]] != k) c.fail("rho is not an involutive permutation at " + d.fix_phi2[k].name);
  }
  const auto emb = d.embedding();
  for (int k = 0; k < m; ++k)
    if (emb[k] < 0) c.fail("fixed point " + d.fix_phi[k].name + " is not among the periodic points");
  return c.end();
}

}  // namespace

GradedComplex cf_phi(const FloerDatum& d) {
  std::vector<Generator> g;
  for (const auto& x : d.fix_phi) g.push_back({x.name, d.grading == Grading::Z2 ? mod2(x.degree) : x.degree, x.action});
  auto c = GradedComplex::make(Ring::GF2, d.grading, g);
  c.d = d.d_phi.to_poly();
  return c;
}

GradedComplex cf_phi2(const FloerDatum& d) {
  std::vector<Generator> g;
  for (const auto& y : d.fix_phi2) g.push_back({y.name, d.grading == Grading::Z2 ? mod2(y.degree) : y.degree, y.action});
  auto c = GradedComplex::make(Ring::GF2, d.grading, g);
  c.d = d.d_phi2.to_poly();
  return c;
}

GradedComplex equivariant_complex(const FloerDatum& d) {
  auto c = cf_phi2(d);
  c.ring = Ring::Poly;
  for (const auto& [l, a] : d.d_eq) c.d = c.d + scaled(a, l.first);
  return c;
}

ValidationReport validate(const FloerDatum& d) {
  ValidationReport rep;
  Checker c(rep);
  if (!structure_check(d, c)) return rep;
  const int m = d.m(), N = d.size2();
  const auto emb = d.embedding();
  const bool exact = d.mode == FloerMode::Exact;
  const auto& P1 = d.fix_phi;
  const auto& P2 = d.fix_phi2;
  auto pair_name = [&](int col) { return P1[col / m].name + ", " + P1[col % m].name; };

  c.begin("degrees");
  auto deg_check = [&](const BitMatrix& a, bool phi, int shift, const std::string& what) {
    for (int t = 0; t < a.rows(); ++t)
      for (int s = 0; s < a.cols(); ++s)
        if (a.get(t, s)) {
          const int dt = phi ? P1[t].degree : P2[t].degree;
          const int ds = phi ? P1[s].degree : P2[s].degree;
          if (!deg_eq(d.grading, dt, ds + shift))
            c.fail(what + ": " + (phi ? P1[s].name : P2[s].name) + " -> " + (phi ? P1[t].name : P2[t].name));
        }
  };
  deg_check(d.d_phi, true, 1, "d_phi");
  deg_check(d.d_phi2, false, 1, "d_phi2");
  for (const auto& [l, a] : d.d_eq) deg_check(a, false, 1 - l.first, level_name("d_eq", l.first, l.second));
  for (const auto& [l, a] : d.pants)
    for (int y = 0; y < N; ++y)
      for (int col = 0; col < m * m; ++col)
        if (a.get(y, col) && !deg_eq(d.grading, P2[y].degree, P1[col / m].degree + P1[col % m].degree - l.first))
          c.fail(level_name("p", l.first, l.second) + ": (" + P2[y].name + "; " + pair_name(col) + ")");
  c.end();

  c.begin("d_squared");
  if (!(d.d_phi * d.d_phi).is_zero()) c.fail("d_phi^2 != 0");
  if (!(d.d_phi2 * d.d_phi2).is_zero()) c.fail("d_phi2^2 != 0");
  c.end();

  c.begin("rho");
  {
    std::vector<bool> image(N, false);
    for (int k = 0; k < m; ++k) image[emb[k]] = true;
    for (int y = 0; y < N; ++y) {
      const int r = d.rho[y];
      if ((r == y) != image[y])
        c.fail(image[y] ? P2[y].name + " is a fixed point of phi but rho moves it"
                        : P2[y].name + " is fixed by rho but is not a fixed point of phi");
      if (!deg_eq(d.grading, P2[r].degree, P2[y].degree)) c.fail("rho changes the degree of " + P2[y].name);
      if (P2[r].action != P2[y].action) c.fail("rho changes the action of " + P2[y].name);
    }
  }
  c.end();

  c.begin("actions");
  if (exact)
    for (int k = 0; k < m; ++k)
      if (P2[emb[k]].action != Action(2) * P1[k].action)
        c.fail("A2(" + P1[k].name + ") = " + format_action(P2[emb[k]].action) + " != 2 A(" + P1[k].name + ")");
  c.end();

  c.begin("action_gaps");
  if (exact) {
    const Action gap = Action(2) * d.epsilon;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const Action diff = P1[a].action - P1[b].action;
        if (diff > Action(0) && diff < gap) c.fail("A(" + P1[a].name + ") - A(" + P1[b].name + ") in (0, 2 eps)");
      }
    for (int y = 0; y < N; ++y)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          if (a == b && emb[a] == y) continue;
          const Action e = P2[y].action - P1[a].action - P1[b].action;
          if (e > -gap && e < gap)
            c.fail("A2(" + P2[y].name + ") - A(" + P1[a].name + ") - A(" + P1[b].name + ") in (-2 eps, 2 eps)");
        }
  }
  c.end();

  c.begin("zero_energy");
  {
    auto strict = [&](const BitMatrix& a, bool phi, int i, const std::string& what) {
      for (int t = 0; t < a.rows(); ++t)
        for (int s = 0; s < a.cols(); ++s)
          if (a.get(t, s)) {
            const Action e = phi ? energy(d.mode, P1[t].action, P1[s].action, i) : energy(d.mode, P2[t].action, P2[s].action, i);
            if (e <= Action(0))
              c.fail(what + ": " + (phi ? P1[s].name : P2[s].name) + " -> " + (phi ? P1[t].name : P2[t].name) +
                     " does not increase the action");
          }
    };
    strict(d.d_phi, true, 0, "d_phi");
    strict(d.d_phi2, false, 0, "d_phi2");
    const BitMatrix R = d.rho_matrix();
    for (const auto& [l, a] : d.d_eq) {
      const std::string what = level_name("d_eq", l.first, l.second);
      for (int t = 0; t < N; ++t)
        for (int s = 0; s < N; ++s) {
          const Action e = energy(d.mode, P2[t].action, P2[s].action, l.first);
          if (l.first == 1 && e == Action(0)) {
            const bool want = l.second > 0 ? t == s : R.get(t, s);
            if (a.get(t, s) != want)
              c.fail(what + ": zero-energy part differs from " + (l.second > 0 ? "id" : "rho") + " at " + P2[s].name +
                     " -> " + P2[t].name);
          } else if (a.get(t, s) && e <= Action(0)) {
            c.fail(what + ": " + P2[s].name + " -> " + P2[t].name + " does not increase the action");
          }
        }
    }
    for (int sg : {1, -1})
      if (N > 0 && !d.d_eq.count({1, sg})) c.fail(level_name("d_eq", 1, sg) + " is missing");
  }
  c.end();

  const int Ld = d.max_d_level();
  c.begin("d_relations");
  for (int i = 1; i <= 2 * Ld; ++i)
    for (int sg : {1, -1}) {
      const BitMatrix r = d_residual(d, d.d_phi2, i, sg);
      for (int t = 0; t < N; ++t)
        for (int s = 0; s < N; ++s)
          if (r.get(t, s)) c.fail("level " + std::to_string(i) + sgn(sg) + ": " + P2[s].name + " -> " + P2[t].name);
    }
  c.end();

  c.begin("d_eq_squared");
  {
    const auto eq = equivariant_complex(d);
    const PolyMatrix sq = eq.d * eq.d;
    for (int t = 0; t < N; ++t)
      for (int s = 0; s < N; ++s)
        if (!sq(t, s).is_zero()) c.fail(P2[s].name + " -> " + P2[t].name + ": " + sq(t, s).str());
  }
  c.end();

  c.begin("continuation");
  {
    const BitMatrix dp = d.deq(1, 1), dm = d.deq(1, -1);
    const bool cp = (d.d_phi2 * dp + dp * d.d_phi2).is_zero();
    const bool cm = (d.d_phi2 * dm + dm * d.d_phi2).is_zero();
    if (!cp) c.fail("d_eq^{1,+} is not a chain map");
    if (!cm) c.fail("d_eq^{1,-} is not a chain map");
    if (cp) {
      const BitMatrix f = induced_on_cohomology(d.d_phi2, dp);
      if (!(f == BitMatrix::identity(f.rows()))) c.fail("d_eq^{1,+} does not induce the identity");
    }
    if (cm) {
      const BitMatrix f = induced_on_cohomology(d.d_phi2, dm);
      if (!(f * f == BitMatrix::identity(f.rows()))) c.fail("d_eq^{1,-} does not induce an involution");
    }
  }
  c.end();

  c.begin("pants_zero");
  if (!d.p(0, -1).is_zero()) c.fail("p^{0,-} != 0");
  c.end();

  c.begin("pants_action");
  if (exact)
    for (const auto& [l, a] : d.pants)
      for (int y = 0; y < N; ++y)
        for (int col = 0; col < m * m; ++col)
          if (a.get(y, col)) {
            const int x1 = col / m, x2 = col % m;
            const Action e = P2[y].action - P1[x1].action - P1[x2].action;
            const bool diag = x1 == x2 && emb[x1] == y;
            if (e < Action(0) || (e == Action(0) && !diag))
              c.fail(level_name("p", l.first, l.second) + ": (" + P2[y].name + "; " + pair_name(col) + ") " +
                     (e < Action(0) ? "decreases" : "preserves") + " the action");
          }
  c.end();

  c.begin("p_relations");
  {
    const auto sq = swap_square(d);
    const int top = d.max_p_level() + std::max(1, Ld);
    for (int i = 0; i <= top; ++i)
      for (int sg : {1, -1}) {
        const BitMatrix r = p_residual(d, d.d_phi2, sq, i, sg);
        for (int y = 0; y < N; ++y)
          for (int col = 0; col < m * m; ++col)
            if (r.get(y, col)) c.fail("level " + std::to_string(i) + sgn(sg) + ": (" + P2[y].name + "; " + pair_name(col) + ")");
      }
  }
  c.end();

  c.begin("krein");
  for (int k = 0; k < m; ++k) {
    const auto& x = P1[k];
    if (x.detsign && *x.detsign != (mod2(x.degree) ? -1 : 1))
      c.fail("detsign of " + x.name + " is " + std::to_string(*x.detsign) + " but its degree is " + std::to_string(x.degree));
    if (!x.krein) continue;
    if (x.detsign && !admissible_component(*x.detsign, *x.krein, d.n))
      c.fail("kappa(" + x.name + ") = " + std::to_string(*x.krein) + " is not admissible for sign " + std::to_string(*x.detsign));
    const int col = pair_index(m, k, k);
    HPoly diag;
    for (const auto& [l, a] : d.pants)
      if (a.get(emb[k], col)) diag += HPoly::monomial(l.first);
    const int e = d.n - *x.krein;
    const HPoly want = e >= 0 ? HPoly::monomial(e) : HPoly();
    if (!(diag == want))
      c.fail("diagonal coefficient of (" + x.name + "; " + x.name + ", " + x.name + ") is " + diag.str() + ", expected h^" +
             std::to_string(e));
  }
  c.end();

  c.begin("chain_map");
  for (const auto& f : pants_chain_map(d).failures) c.fail(f);
  c.end();
  return rep;
}

PantsReport pants_chain_map(const FloerDatum& d) {
  PantsReport r;
  r.source = borel_complex(tensor_square_swap(cf_phi(d)));
  r.target = equivariant_complex(d);
  const int m = d.m(), N = d.size2();
  r.map = PolyMatrix(N, m * m);
  for (const auto& [l, a] : d.pants) r.map = r.map + scaled(a, l.first);
  const PolyMatrix diff = r.target.d * r.map + r.map * r.source.d;
  for (int y = 0; y < N; ++y)
    for (int col = 0; col < m * m; ++col)
      for (int e : diff(y, col).exponents())
        r.failures.push_back("h^" + std::to_string(e) + ": (" + d.fix_phi2[y].name + "; " + d.fix_phi[col / m].name + ", " +
                             d.fix_phi[col % m].name + ")");
  r.chain_map = r.failures.empty();
  return r;
}

FloerInvariants floer_invariants(const FloerDatum& d) {
  FloerInvariants f;
  const auto eq = equivariant_complex(d);
  f.hf_poly = cohomology(eq);
  f.hf_poly_dim = f.hf_poly.free_rank > 0 ? -1 : f.hf_poly.torsion_dim;
  f.hf_eq = local_module_invariants(eq.d);
  f.localized_dim = d.size2() - 2 * frac_rank(eq.d);
  f.consistent = f.hf_eq.free_rank <= f.hf_poly.free_rank && f.hf_eq.free_rank == f.localized_dim;
  return f;
}

namespace {

int hf_phi_dim(const FloerDatum& d) { return d.m() - 2 * gf2_rank(d.d_phi); }

// Keeps the entries of an h-polynomial matrix whose energy vanishes.
PolyMatrix zero_energy_part(const PolyMatrix& a, const std::vector<Action>& tgt, const std::vector<Action>& src) {
  PolyMatrix z(a.rows, a.cols);
  for (int t = 0; t < a.rows; ++t)
    for (int s = 0; s < a.cols; ++s)
      if (tgt[t] == src[s]) z(t, s) = a(t, s);
  return z;
}

}  // namespace

LocalizedReport localized_check(const FloerDatum& d) {
  LocalizedReport r;
  const auto pc = pants_chain_map(d);
  const int m = d.m(), N = d.size2(), M = m * m;
  r.chain_map = pc.chain_map;
  r.dim_source = M - 2 * frac_rank(pc.source.d);
  r.dim_target = N - 2 * frac_rank(pc.target.d);
  r.dim_hf_phi = hf_phi_dim(d);
  r.bijective = 2 * frac_rank(mapping_cone(pc.source.d, pc.target.d, pc.map)) == M + N;
  r.dims_agree = r.dim_source == r.dim_hf_phi && r.dim_target == r.dim_hf_phi;

  std::vector<Action> a1(M), a2(N);
  for (int col = 0; col < M; ++col) a1[col] = d.fix_phi[col / m].action + d.fix_phi[col % m].action;
  for (int y = 0; y < N; ++y) a2[y] = d.fix_phi2[y].action;
  const PolyMatrix s0 = zero_energy_part(pc.source.d, a1, a1);
  const PolyMatrix t0 = zero_energy_part(pc.target.d, a2, a2);
  const PolyMatrix f0 = zero_energy_part(pc.map, a2, a1);
  r.e0_bijective = 2 * frac_rank(mapping_cone(s0, t0, f0)) == M + N;

  const auto emb = d.embedding();
  bool diag = true;
  for (int y = 0; y < N; ++y)
    for (int col = 0; col < M; ++col) {
      const int x1 = col / m, x2 = col % m;
      const HPoly& e = f0(y, col);
      if (x1 == x2 && emb[x1] == y) {
        const auto& k = d.fix_phi[x1].krein;
        if (k) diag = diag && d.n - *k >= 0 && e == HPoly::monomial(d.n - *k);
        else diag = diag && !e.is_zero() && e.exponents().size() == 1;
      } else {
        diag = diag && e.is_zero();
      }
    }
  r.e0_is_diagonal = diag;
  return r;
}

BitMatrix floer_iota(const FloerDatum& d) {
  const BitMatrix dm = d.deq(1, -1);
  if (!(d.d_phi2 * dm + dm * d.d_phi2).is_zero()) throw InputError("d_eq^{1,-} is not a chain map of CF(phi^2)");
  return induced_on_cohomology(d.d_phi2, dm);
}

FloerSmithReport smith_check(const FloerDatum& d) {
  const BitMatrix iota = floer_iota(d);
  FloerSmithReport r;
  r.h_dim = iota.rows();
  r.invariant_dim = r.h_dim - gf2_rank(iota + BitMatrix::identity(r.h_dim));
  const auto eq = equivariant_complex(d);
  const auto inv = local_module_invariants(eq.d);
  r.generator_count = inv.generator_count;
  r.free_rank = inv.free_rank;
  r.localized_dim = d.size2() - 2 * frac_rank(eq.d);
  r.hf_phi_dim = hf_phi_dim(d);
  return r;
}

E2Report e2_check(const FloerDatum& d, int truncation) {
  if (truncation < 2) throw InputError("e2_check needs a truncation of at least 2");
  E2Report r;
  r.truncation = truncation;
  const auto eq = equivariant_complex(d);
  const auto tc = truncate_complex(eq, truncation);
  const int N = d.size2();
  Filtration f;
  for (int j = 0; j < truncation; ++j)
    for (int y = 0; y < N; ++y) f.weight.push_back(j);
  const auto ss = spectral_sequence(tc, f);
  for (int p = 0; p < truncation; ++p) r.e2[p] = 0;
  if (ss.pages.size() > 2)
    for (const auto& [key, dim] : ss.pages[2].dims) r.e2[key.first] += dim;
  const BitMatrix iota = floer_iota(d);
  const int h = iota.rows();
  const int rk = gf2_rank(iota + BitMatrix::identity(h));
  for (int p = 0; p < truncation; ++p) r.expected[p] = (p == 0 || p == truncation - 1) ? h - rk : h - 2 * rk;
  return r;
}

TateE1Report tate_e1_check(const FloerDatum& d) {
  TateE1Report r;
  r.expected = d.m();
  const auto eq = equivariant_complex(d);
  std::map<Action, std::vector<int>> levels;
  for (int y = 0; y < d.size2(); ++y) levels[d.fix_phi2[y].action].push_back(y);
  for (const auto& [a, idx] : levels) {
    const int k = static_cast<int>(idx.size());
    PolyMatrix z(k, k);
    for (int t = 0; t < k; ++t)
      for (int s = 0; s < k; ++s) {
        const HPoly& e = eq.d(idx[t], idx[s]);
        for (int ex : e.exponents())
          if (energy(d.mode, a, a, ex) == Action(0)) z(t, s) += HPoly::monomial(ex);
      }
    const int dim = k - 2 * frac_rank(z);
    r.by_level[format_action(a)] = dim;
    r.total += dim;
  }
  return r;
}

bool TransferReport::side_conditions_hold() const {
  for (const auto& [name, ok] : side_conditions)
    if (!ok) return false;
  return true;
}

TransferReport transfer(const FloerDatum& d, std::optional<TransferDecomposition> t) {
  const int N = d.size2();
  if (static_cast<int>(d.rho.size()) != N) throw InputError("transfer: rho has the wrong size");
  for (int y = 0; y < N; ++y)
    if (d.rho[y] == y) throw InputError("transfer needs a free involution; " + d.fix_phi2[y].name + " is fixed");
  std::vector<int> plus;
  if (t) {
    plus = t->plus_set;
    std::set<int> orbits;
    for (int y : plus) {
      if (y < 0 || y >= N) throw InputError("transfer: plus set index out of range");
      if (!orbits.insert(std::min(y, d.rho[y])).second) throw InputError("transfer: two plus elements in one orbit");
    }
    if (static_cast<int>(orbits.size()) * 2 != N) throw InputError("transfer: plus set misses an orbit");
  } else {
    for (int y = 0; y < N; ++y)
      if (y < d.rho[y]) plus.push_back(y);
  }
  const int D = static_cast<int>(plus.size());
  std::vector<int> plus_pos(N, -1);
  for (int k = 0; k < D; ++k) plus_pos[plus[k]] = k;

  TransferReport r;
  for (int y : plus) r.plus_names.push_back(d.fix_phi2[y].name);
  r.free_orbits = N / 2;
  r.hf_poly_dim = floer_invariants(d).hf_poly_dim;

  const auto eq = equivariant_complex(d);
  PolyMatrix eps = eq.d;
  for (int y = 0; y < N; ++y) {
    eps(y, y) += HPoly::monomial(1);
    eps(d.rho[y], y) += HPoly::monomial(1);
  }

  using V = PolyVec;
  auto zero = [&] { return V(N); };
  auto add = [](V a, const V& b) {
    for (size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    return a;
  };
  auto is_zero = [](const V& v) { return std::all_of(v.begin(), v.end(), [](const HPoly& p) { return p.is_zero(); }); };
  auto i_map = [&](const BitVec& x) {
    V v = zero();
    for (int k = 0; k < D; ++k)
      if (x.get(k)) {
        v[plus[k]] += HPoly::one();
        v[d.rho[plus[k]]] += HPoly::one();
      }
    return v;
  };
  auto p_map = [&](const V& v) {
    BitVec x(D);
    for (int k = 0; k < D; ++k) x.set(k, v[plus[k]].constant_term());
    return x;
  };
  auto k_map = [&](const V& v) {
    V w = zero();
    for (int y : plus) w[d.rho[y]] = v[y].shift_down(1);
    return w;
  };
  auto delta = [&](const V& v) {
    V w = zero();
    for (int y = 0; y < N; ++y) {
      w[y] += v[y].shift_up(1);
      w[d.rho[y]] += v[y].shift_up(1);
    }
    return w;
  };

  // Side conditions on the basis y.h^j of CF(phi^2)[h], j <= J, and on D.
  const int J = d.max_d_level() + 2;
  bool pi = true, pk = true, ki = true, kk = true, di = true, pd = true, ip = true;
  for (int k = 0; k < D; ++k) {
    BitVec e(D);
    e.set(k, true);
    const V ie = i_map(e);
    pi = pi && p_map(ie) == e;
    ki = ki && is_zero(k_map(ie));
    di = di && is_zero(delta(ie));
  }
  for (int y = 0; y < N; ++y)
    for (int j = 0; j <= J; ++j) {
      V v = zero();
      v[y] = HPoly::monomial(j);
      pk = pk && p_map(k_map(v)).is_zero();
      kk = kk && is_zero(k_map(k_map(v)));
      pd = pd && p_map(delta(v)).is_zero();
      const V lhs = i_map(p_map(v));
      const V rhs = add(add(v, delta(k_map(v))), k_map(delta(v)));
      ip = ip && lhs == rhs;
    }

  // d_D = p eps i + p eps k eps i + ...
  long long spread = 0;
  if (N > 0) {
    Action lo = d.fix_phi2[0].action, hi = lo;
    for (const auto& y : d.fix_phi2) {
      lo = std::min(lo, y.action);
      hi = std::max(hi, y.action);
    }
    const Action s = hi - lo;
    spread = s.numerator() / s.denominator() + 1;
  }
  const long long bound = static_cast<long long>(std::max(N, 1)) * (d.max_d_level() + 1) * (spread + 1);
  r.d_d = BitMatrix(D, D);
  for (int k = 0; k < D; ++k) {
    BitVec e(D);
    e.set(k, true);
    V v = equihf::apply(eps, i_map(e));
    V sum = zero();
    int it = 0;
    while (!is_zero(v)) {
      if (++it > bound)
        throw NumericError("transfer: the perturbation series did not terminate after " + std::to_string(bound) +
                           " iterations (k(d_eq - delta) is not locally nilpotent)");
      sum = add(sum, v);
      v = equihf::apply(eps, k_map(v));
    }
    r.iterations = std::max(r.iterations, it);
    const BitVec col = p_map(sum);
    for (int t2 = 0; t2 < D; ++t2) r.d_d.set(t2, k, col.get(t2));
  }
  r.side_conditions = {{"p.i = id", pi},
                       {"p.k = 0", pk},
                       {"k.i = 0", ki},
                       {"k.k = 0", kk},
                       {"delta.i = 0", di},
                       {"p.delta = 0", pd},
                       {"i.p = id + delta.k + k.delta", ip},
                       {"d_D^2 = 0", (r.d_d * r.d_d).is_zero()}};
  r.dim_h = D - 2 * gf2_rank(r.d_d);
  return r;
}

// ---------------------------------------------------------------------------
// Built-in data

namespace {

void set_entry(FloerDatum& d, BitMatrix& a, const std::string& t, const std::string& s) {
  int ti = -1, si = -1;
  for (int k = 0; k < d.size2(); ++k) {
    if (d.fix_phi2[k].name == t) ti = k;
    if (d.fix_phi2[k].name == s) si = k;
  }
  a.set(ti, si, true);
}

void set_pants(FloerDatum& d, int i, int sg, const std::string& y, const std::string& a, const std::string& b) {
  auto idx1 = [&](const std::string& n) {
    for (int k = 0; k < d.m(); ++k)
      if (d.fix_phi[k].name == n) return k;
    return -1;
  };
  int yi = -1;
  for (int k = 0; k < d.size2(); ++k)
    if (d.fix_phi2[k].name == y) yi = k;
  auto [it, fresh] = d.pants.try_emplace({i, sg}, d.size2(), d.m() * d.m());
  it->second.set(yi, pair_index(d.m(), idx1(a), idx1(b)), true);
}

void standard_continuation(FloerDatum& d) {
  d.d_eq[{1, 1}] = BitMatrix::identity(d.size2());
  d.d_eq[{1, -1}] = d.rho_matrix();
}

FloerDatum pair_datum(const std::string& name, int i, int n, bool twisted) {
  FloerDatum d;
  d.name = name + "(i=" + std::to_string(i) + ",n=" + std::to_string(n) + ")";
  d.n = n;
  const int shift = twisted ? 1 : 0;
  const int sx = (i - 1 + shift) % 2 ? -1 : 1;
  d.fix_phi = {{"x", i - 1 - shift, Action(0), n - i + 1, sx}, {"y", i - shift, Action(1, 10), n - i, -sx}};
  d.fix_phi2 = {{"x", i - 1 - 2 * shift, Action(0)}, {"y", i - 2 * shift, Action(1, 5)}};
  d.rho = {0, 1};
  d.d_phi = BitMatrix(2, 2);
  d.d_phi.set(1, 0, true);
  d.d_phi2 = d.d_phi;
  standard_continuation(d);
  const int k = i - 1;
  set_pants(d, k, 1, "x", "x", "x");
  set_pants(d, k, 1, "y", "x", "y");
  set_pants(d, k + 1, -1, "y", "y", "y");
  return d;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"morse_pair", "twisted_pair", "annulus", "clifford", "fixed_point"}; }

FloerDatum builtin_example(const std::string& name, int i, int n) {
  if (n < 1) throw InputError("builtin_example: n must be at least 1");
  if (name == "morse_pair") {
    if (i < 1 || i > 2 * n) throw InputError("morse_pair needs 1 <= i <= 2n");
    return pair_datum(name, i, n, false);
  }
  if (name == "twisted_pair") {
    if (i < 2 || i > 2 * n - 1) throw InputError("twisted_pair needs 2 <= i <= 2n-1");
    return pair_datum(name, i, n, true);
  }
  FloerDatum d;
  d.name = name;
  if (name == "annulus") {
    d.fix_phi = {{"x", 0, Action(0), 0, 1}, {"y", 1, Action(1, 2), 0, -1}};
    d.fix_phi2 = {{"x", -1, Action(0)}, {"z0", 0, Action(1, 10)}, {"z1", 0, Action(1, 10)}, {"y", 1, Action(1)}};
    d.rho = {0, 2, 1, 3};
    d.d_phi = BitMatrix(2, 2);
    d.d_phi.set(1, 0, true);
    d.d_phi2 = BitMatrix(4, 4);
    set_entry(d, d.d_phi2, "z0", "x");
    set_entry(d, d.d_phi2, "z1", "x");
    set_entry(d, d.d_phi2, "y", "z0");
    set_entry(d, d.d_phi2, "y", "z1");
    standard_continuation(d);
    set_pants(d, 0, 1, "z0", "x", "x");
    set_pants(d, 0, 1, "y", "x", "y");
    set_pants(d, 1, -1, "x", "x", "x");
    set_pants(d, 1, -1, "y", "y", "y");
    return d;
  }
  if (name == "clifford") {
    d.mode = FloerMode::Monotone;
    d.grading = Grading::Z2;
    d.fix_phi2 = {{"x--", 0, Action(0)}, {"x++", 0, Action(0)}, {"x-+", 1, Action(0)}, {"x+-", 1, Action(0)}};
    d.rho = {1, 0, 3, 2};
    d.d_phi = BitMatrix(0, 0);
    d.d_phi2 = BitMatrix(4, 4);
    for (const char* s : {"x--", "x++"})
      for (const char* t : {"x-+", "x+-"}) {
        set_entry(d, d.d_phi2, t, s);
        set_entry(d, d.d_phi2, s, t);
      }
    standard_continuation(d);
    return d;
  }
  if (name == "fixed_point") {
    d.fix_phi = {{"x", 0, Action(0), 0, 1}};
    d.fix_phi2 = {{"x", -1, Action(0)}};
    d.rho = {0};
    d.d_phi = BitMatrix(1, 1);
    d.d_phi2 = BitMatrix(1, 1);
    standard_continuation(d);
    set_pants(d, 1, -1, "x", "x", "x");
    return d;
  }
  throw InputError("unknown example '" + name + "'");
}

// ---------------------------------------------------------------------------
// Random data

namespace {

using Orbits = std::vector<std::vector<int>>;

// Random rho-equivariant matrix supported where allowed(t, s) holds.
template <class Allowed>
BitMatrix random_equivariant(std::mt19937_64& rng, const Orbits& orbits, int n, Allowed allowed, double p) {
  std::bernoulli_distribution coin(p);
  BitMatrix a(n, n);
  for (const auto& ot : orbits)
    for (const auto& os : orbits) {
      if (!allowed(ot[0], os[0])) continue;
      if (ot.size() == 1 && os.size() == 1) {
        a.set(ot[0], os[0], coin(rng));
      } else if (ot.size() == 2 && os.size() == 1) {
        const bool b = coin(rng);
        a.set(ot[0], os[0], b);
        a.set(ot[1], os[0], b);
      } else if (ot.size() == 1) {
        const bool b = coin(rng);
        a.set(ot[0], os[0], b);
        a.set(ot[0], os[1], b);
      } else {
        const bool u = coin(rng), v = coin(rng);
        a.set(ot[0], os[0], u);
        a.set(ot[1], os[1], u);
        a.set(ot[1], os[0], v);
        a.set(ot[0], os[1], v);
      }
    }
  return a;
}

// Equivariant differential of degree +1 (mod 2) strictly increasing the action:
// a conjugate of an orbit pairing by a filtered equivariant automorphism. The
// given orbit pairs are used as they are; free orbits are paired at random.
BitMatrix random_differential(std::mt19937_64& rng, const Orbits& orbits, const std::vector<int>& deg,
                              const std::vector<Action>& act, const std::vector<std::pair<int, int>>& preset) {
  const int n = static_cast<int>(deg.size());
  BitMatrix d0(n, n);
  std::vector<bool> used(orbits.size(), false);
  auto pair_up = [&](int o, int o2) {
    for (size_t k = 0; k < orbits[o].size(); ++k) d0.set(orbits[o2][k], orbits[o][k], true);
    used[o] = used[o2] = true;
  };
  for (auto [o, o2] : preset) pair_up(o, o2);
  std::vector<int> order(orbits.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(0.6);
  for (int o : order) {
    if (used[o] || orbits[o].size() != 2 || !coin(rng)) continue;
    for (int o2 : order) {
      if (used[o2] || o2 == o || orbits[o2].size() != 2) continue;
      const int s = orbits[o][0], t = orbits[o2][0];
      if (mod2(deg[t] - deg[s]) != 1 || !(act[t] > act[s])) continue;
      pair_up(o, o2);
      break;
    }
  }
  const BitMatrix p = BitMatrix::identity(n) + random_equivariant(
                                                    rng, orbits, n,
                                                    [&](int t, int s) { return act[t] > act[s] && mod2(deg[t] - deg[s]) == 0; },
                                                    0.4);
  return p * d0 * *gf2_inverse(p);
}

const Action kFixedActions[] = {0, 1, 3, 4, 9, 10, 12, 13};

}  // namespace

FloerDatum random_valid_datum(std::mt19937_64& rng, const RandomDatumOptions& opt) {
  const int maxg = std::max(1, opt.max_generators);
  if (opt.free && maxg < 2) throw InputError("random_valid_datum: free data need at least two generators");
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  for (int attempt = 0; attempt < opt.max_tries; ++attempt) {
    FloerDatum d;
    d.name = "random";
    d.grading = Grading::Z2;
    d.epsilon = Action(1, 4);
    d.n = uni(1, 2);
    const int L = 2 * d.n;
    const int m = opt.free ? 0 : uni(1, std::min(3, maxg));
    const int f = uni(opt.free ? 1 : 0, (maxg - m) / 2);
    const int N = m + 2 * f;

    std::vector<Action> pool(std::begin(kFixedActions), std::end(kFixedActions));
    std::shuffle(pool.begin(), pool.end(), rng);
    Orbits orb1, orb2;
    for (int k = 0; k < m; ++k) {
      FixedPoint x;
      x.name = "x" + std::to_string(k);
      x.degree = uni(0, 1);
      x.action = pool[k];
      x.detsign = x.degree ? -1 : 1;
      const int bound = *x.detsign > 0 ? d.n : d.n - 1;
      x.krein = uni(-bound, bound);
      d.fix_phi.push_back(x);
      d.fix_phi2.push_back({x.name, mod2(d.n - *x.krein), Action(2) * x.action});
      d.rho.push_back(k);
      orb1.push_back({k});
      orb2.push_back({k});
    }
    for (int k = 0; k < f; ++k) {
      const int deg = uni(0, 1);
      const Action a = Action(uni(0, 26)) + Action(1, 2);
      const int base = d.size2();
      d.fix_phi2.push_back({"a" + std::to_string(k), deg, a});
      d.fix_phi2.push_back({"b" + std::to_string(k), deg, a});
      d.rho.push_back(base + 1);
      d.rho.push_back(base);
      orb2.push_back({base, base + 1});
    }
    std::vector<int> deg1, deg2;
    std::vector<Action> act1, act2;
    for (const auto& x : d.fix_phi) {
      deg1.push_back(x.degree);
      act1.push_back(x.action);
    }
    for (const auto& y : d.fix_phi2) {
      deg2.push_back(y.degree);
      act2.push_back(y.action);
    }
    // Cancelling pairs a -> b of CF(phi), mirrored in CF(phi^2); kappa(b) is
    // re-drawn with the parity that puts b one degree above a there too.
    std::vector<std::pair<int, int>> pairs;
    {
      std::vector<int> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<bool> used(m, false);
      for (int a : order) {
        if (used[a] || !uni(0, 2)) continue;
        for (int b : order) {
          if (used[b] || b == a || mod2(deg1[b] - deg1[a]) != 1 || !(act1[b] > act1[a])) continue;
          auto& xb = d.fix_phi[b];
          const int bound = *xb.detsign > 0 ? d.n : d.n - 1;
          std::vector<int> ks;
          for (int k = -bound; k <= bound; ++k)
            if (mod2(d.n - k) == mod2(deg2[a] + 1)) ks.push_back(k);
          if (ks.empty()) continue;
          xb.krein = ks[uni(0, static_cast<int>(ks.size()) - 1)];
          deg2[b] = d.fix_phi2[b].degree = mod2(d.n - *xb.krein);
          pairs.push_back({a, b});
          used[a] = used[b] = true;
          break;
        }
      }
    }
    d.d_phi = random_differential(rng, orb1, deg1, act1, pairs);
    d.d_phi2 = random_differential(rng, orb2, deg2, act2, pairs);
    const BitMatrix R = d.rho_matrix();
    BitMatrix X(N, N);
    if (uni(0, 1)) {
      const BitMatrix K = random_equivariant(
          rng, orb2, N, [&](int t, int s) { return act2[t] >= act2[s] && mod2(deg2[t] - deg2[s]) == 1; }, 0.3);
      X = d.d_phi2 * K + K * d.d_phi2;
      if (!(X * X).is_zero()) X = BitMatrix(N, N);
    }
    d.d_eq[{1, 1}] = BitMatrix::identity(N) + X;
    d.d_eq[{1, -1}] = R;

    // Unknowns: the entries of p^{j,tau} (j <= L) allowed by degree and action.
    struct Var {
      int j, tau, y, col;
    };
    std::vector<Var> vars;
    const int M = m * m;
    for (int j = 0; j <= L; ++j)
      for (int tau : {1, -1}) {
        if (j == 0 && tau < 0) continue;
        for (int y = 0; y < N; ++y)
          for (int col = 0; col < M; ++col) {
            const int a = col / m, b = col % m;
            if (mod2(deg2[y] - deg1[a] - deg1[b] + j) != 0) continue;
            const Action e = act2[y] - act1[a] - act1[b];
            if (e < Action(0) || (e == Action(0) && !(a == b && y == a))) continue;
            vars.push_back({j, tau, y, col});
          }
      }
    // Equations: the p-relations at levels 0..L+1 and the diagonal coefficients.
    const int levels = L + 2;
    auto eq_index = [&](int i, int sg, int y, int col) { return ((i * 2 + (sg > 0 ? 0 : 1)) * N + y) * M + col; };
    const int n_rel = levels * 2 * N * M;
    const int n_eq = n_rel + m * (L + 1);
    BitMatrix A(n_eq, static_cast<int>(vars.size()));
    BitVec rhs(n_eq);
    const auto sq = swap_square(d);
    std::vector<int> swap_col(M);
    for (int col = 0; col < M; ++col) swap_col[col] = pair_index(m, col % m, col / m);
    for (int v = 0; v < static_cast<int>(vars.size()); ++v) {
      const auto [j, tau, y, col] = vars[v];
      // d2 p + p T at level j
      for (int t = 0; t < N; ++t)
        if (d.d_phi2.get(t, y)) A.flip(eq_index(j, tau, t, col), v);
      for (int c2 = 0; c2 < M; ++c2)
        if (sq.t.get(col, c2)) A.flip(eq_index(j, tau, y, c2), v);
      if (j + 1 < levels) {
        A.flip(eq_index(j + 1, tau, y, col), v);
        A.flip(eq_index(j + 1, -tau, y, swap_col[col]), v);
        for (int t = 0; t < N; ++t) {
          if (d.d_eq[{1, 1}].get(t, y)) A.flip(eq_index(j + 1, tau, t, col), v);
          if (R.get(t, y)) A.flip(eq_index(j + 1, -tau, t, col), v);
        }
      }
      const int a = col / m, b = col % m;
      if (a == b && y == a) A.flip(n_rel + a * (L + 1) + j, v);
    }
    for (int k = 0; k < m; ++k) rhs.set(n_rel + k * (L + 1) + (d.n - *d.fix_phi[k].krein), true);
    const auto sol = gf2_solve_random(A, rhs, rng);
    if (!sol) continue;
    for (int v = 0; v < static_cast<int>(vars.size()); ++v)
      if (sol->get(v)) {
        auto [it, fresh] = d.pants.try_emplace({vars[v].j, vars[v].tau}, N, M);
        it->second.set(vars[v].y, vars[v].col, true);
      }
    const auto rep = validate(d);
    if (!rep.ok())
      throw std::logic_error("random_valid_datum produced invalid data: " + rep.failures[0].check + ": " +
                             rep.failures[0].detail);
    return d;
  }
  throw std::runtime_error("random_valid_datum: no consistent datum found in " + std::to_string(opt.max_tries) + " tries");
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

int parse_int(const std::string& s, const std::string& where) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw InputError(where + ": expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw InputError(where + ": expected an integer, got '" + s + "'");
  return v;
}

int parse_sign(const std::string& s, const std::string& where) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw InputError(where + ": expected a sign, got '" + s + "'");
}

}  // namespace

FloerDatum parse_datum(const std::string& text) {
  FloerDatum d;
  d.name.clear();
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0, sec_i = 0, sec_s = 0;
  struct Edge {
    std::string section;
    int i, s;
    std::vector<std::string> src, dst;
    std::string where;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<std::string, std::string>> rho_pairs;
  std::vector<std::string> rho_where;
  std::set<Level> declared_deq, declared_p;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    if (const auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(where + ": unterminated section header");
      auto t = tokens(line.substr(1, line.size() - 2));
      if (t.empty()) throw InputError(where + ": empty section header");
      section = t[0];
      static const std::set<std::string> plain{"phi", "phi2", "rho", "d_phi", "d_phi2"};
      if (plain.count(section)) {
        if (t.size() != 1) throw InputError(where + ": section [" + section + "] takes no arguments");
      } else if (section == "d_eq" || section == "pants") {
        if (t.size() != 3) throw InputError(where + ": expected [" + section + " i sign]");
        sec_i = parse_int(t[1], where);
        sec_s = parse_sign(t[2], where);
        if (section == "d_eq" && sec_i < 1) throw InputError(where + ": d_eq levels start at 1");
        if (section == "pants" && sec_i < 0) throw InputError(where + ": pants levels start at 0");
        auto& decl = section == "d_eq" ? declared_deq : declared_p;
        if (!decl.insert({sec_i, sec_s}).second) throw InputError(where + ": duplicate section");
      } else {
        throw InputError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError(where + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key == "name") d.name = value;
      else if (key == "mode") {
        if (value == "exact") d.mode = FloerMode::Exact;
        else if (value == "monotone") d.mode = FloerMode::Monotone;
        else throw InputError(where + ": unknown mode '" + value + "'");
      } else if (key == "grading") {
        if (value == "Z") d.grading = Grading::Z;
        else if (value == "Z2") d.grading = Grading::Z2;
        else throw InputError(where + ": unknown grading '" + value + "'");
      } else if (key == "n") d.n = parse_int(value, where);
      else if (key == "epsilon") {
        try {
          d.epsilon = parse_action(value);
        } catch (const InputError& e) {
          throw InputError(where + ": " + e.what());
        }
      } else throw InputError(where + ": unknown key '" + key + "'");
      continue;
    }
    auto t = tokens(line);
    auto action = [&](const std::string& s) {
      try {
        return parse_action(s);
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    };
    if (section == "phi") {
      if (t.size() < 3 || t.size() > 5) throw InputError(where + ": expected 'name degree action [krein=k] [detsign=s]'");
      FixedPoint x{t[0], parse_int(t[1], where), action(t[2]), std::nullopt, std::nullopt};
      for (size_t k = 3; k < t.size(); ++k) {
        if (t[k].rfind("krein=", 0) == 0) x.krein = parse_int(t[k].substr(6), where);
        else if (t[k].rfind("detsign=", 0) == 0) x.detsign = parse_sign(t[k].substr(8), where);
        else throw InputError(where + ": unknown attribute '" + t[k] + "'");
      }
      d.fix_phi.push_back(x);
    } else if (section == "phi2") {
      if (t.size() != 3) throw InputError(where + ": expected 'name degree action'");
      d.fix_phi2.push_back({t[0], parse_int(t[1], where), action(t[2])});
    } else if (section == "rho") {
      if (t.size() != 2) throw InputError(where + ": expected a pair of swapped points");
      rho_pairs.push_back({t[0], t[1]});
      rho_where.push_back(where);
    } else {
      const auto arrow = std::find(t.begin(), t.end(), "->");
      if (arrow == t.end()) throw InputError(where + ": expected 'source -> targets'");
      Edge e{section, sec_i, sec_s, {t.begin(), arrow}, {arrow + 1, t.end()}, where};
      const size_t want = section == "pants" ? 2 : 1;
      if (e.src.size() != want) throw InputError(where + ": expected " + std::to_string(want) + " source name(s)");
      edges.push_back(e);
    }
  }

  const int m = d.m(), N = d.size2();
  auto idx = [&](bool phi, const std::string& name, const std::string& where) {
    if (phi) {
      for (int k = 0; k < m; ++k)
        if (d.fix_phi[k].name == name) return k;
    } else {
      for (int k = 0; k < N; ++k)
        if (d.fix_phi2[k].name == name) return k;
    }
    throw InputError(where + ": unknown generator '" + name + "'");
  };
  d.rho.resize(N);
  std::iota(d.rho.begin(), d.rho.end(), 0);
  for (size_t k = 0; k < rho_pairs.size(); ++k) {
    const int a = idx(false, rho_pairs[k].first, rho_where[k]), b = idx(false, rho_pairs[k].second, rho_where[k]);
    if (a == b || d.rho[a] != a || d.rho[b] != b) throw InputError(rho_where[k] + ": rho pairs must be disjoint and distinct");
    d.rho[a] = b;
    d.rho[b] = a;
  }
  d.d_phi = BitMatrix(m, m);
  d.d_phi2 = BitMatrix(N, N);
  for (const auto& l : declared_deq) d.d_eq[l] = BitMatrix(N, N);
  for (const auto& l : declared_p) d.pants[l] = BitMatrix(N, m * m);
  for (const auto& e : edges) {
    const bool phi = e.section == "d_phi";
    BitMatrix* a = nullptr;
    int col = 0;
    if (e.section == "d_phi") a = &d.d_phi;
    else if (e.section == "d_phi2") a = &d.d_phi2;
    else if (e.section == "d_eq") a = &d.d_eq[{e.i, e.s}];
    else a = &d.pants[{e.i, e.s}];
    if (e.section == "pants") col = pair_index(m, idx(true, e.src[0], e.where), idx(true, e.src[1], e.where));
    else col = idx(phi, e.src[0], e.where);
    for (const auto& tn : e.dst) {
      const int t = idx(phi, tn, e.where);
      if (a->get(t, col)) throw InputError(e.where + ": duplicate entry '" + tn + "'");
      a->set(t, col, true);
    }
  }
  return d;
}

std::string serialize_datum(const FloerDatum& d) {
  std::ostringstream out;
  const int m = d.m(), N = d.size2();
  out << "name = " << d.name << "\n";
  out << "mode = " << mode_name(d.mode) << "\n";
  out << "grading = " << (d.grading == Grading::Z ? "Z" : "Z2") << "\n";
  out << "n = " << d.n << "\n";
  out << "epsilon = " << format_action(d.epsilon) << "\n";
  out << "\n[phi]\n";
  for (const auto& x : d.fix_phi) {
    out << x.name << " " << x.degree << " " << format_action(x.action);
    if (x.krein) out << " krein=" << *x.krein;
    if (x.detsign) out << " detsign=" << (*x.detsign > 0 ? "+1" : "-1");
    out << "\n";
  }
  out << "\n[phi2]\n";
  for (const auto& y : d.fix_phi2) out << y.name << " " << y.degree << " " << format_action(y.action) << "\n";
  out << "\n[rho]\n";
  for (int y = 0; y < static_cast<int>(d.rho.size()); ++y)
    if (y < d.rho[y]) out << d.fix_phi2[y].name << " " << d.fix_phi2[d.rho[y]].name << "\n";
  auto block = [&](const BitMatrix& a, const std::vector<std::string>& tn, const std::vector<std::string>& sn) {
    for (int s = 0; s < a.cols(); ++s) {
      std::string line;
      for (int t = 0; t < a.rows(); ++t)
        if (a.get(t, s)) line += " " + tn[t];
      if (!line.empty()) out << sn[s] << " ->" << line << "\n";
    }
  };
  std::vector<std::string> n1, n2, pairs;
  for (const auto& x : d.fix_phi) n1.push_back(x.name);
  for (const auto& y : d.fix_phi2) n2.push_back(y.name);
  for (int col = 0; col < m * m; ++col) pairs.push_back(n1[col / m] + " " + n1[col % m]);
  out << "\n[d_phi]\n";
  block(d.d_phi, n1, n1);
  out << "\n[d_phi2]\n";
  block(d.d_phi2, n2, n2);
  for (const auto& [l, a] : d.d_eq) {
    out << "\n[d_eq " << l.first << " " << sgn(l.second) << "]\n";
    block(a, n2, n2);
  }
  for (const auto& [l, a] : d.pants) {
    out << "\n[pants " << l.first << " " << sgn(l.second) << "]\n";
    block(a, n2, pairs);
  }
  (void)N;
  return out.str();
}

}  // namespace equihf
