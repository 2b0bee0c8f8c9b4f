#include "equihf/equivariant.hpp"

#include <algorithm>
#include <functional>

namespace equihf {

void validate_involutive(const InvolutiveComplex& w) {
  const int n = w.complex.size();
  if (w.complex.ring != Ring::GF2) throw InputError("involutive complex must be over GF(2)");
  if (w.iota.rows() != n || w.iota.cols() != n) throw InputError("involution has the wrong size");
  if (!(w.iota * w.iota == BitMatrix::identity(n))) throw InputError("involution does not square to the identity");
  BitMatrix d = BitMatrix::from_poly(w.complex.d);
  if (!(w.iota * d == d * w.iota)) throw InputError("involution is not a chain map");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w.iota.get(i, j) && w.complex.gens[i].degree != w.complex.gens[j].degree)
        throw InputError("involution changes degree: " + w.complex.gens[j].name + " -> " + w.complex.gens[i].name);
}

GradedComplex borel_complex(const InvolutiveComplex& w) {
  validate_involutive(w);
  GradedComplex c = w.complex;
  c.ring = Ring::Poly;
  c.strict_action = false;
  const HPoly h = HPoly::monomial(1);
  for (int i = 0; i < c.size(); ++i)
    for (int j = 0; j < c.size(); ++j) {
      bool e = (i == j) != w.iota.get(i, j);
      if (e) c.d(i, j) += h;
    }
  return c;
}

EqModuleInvariants local_module_invariants(const PolyMatrix& d) {
  SmithResult s = smith_local(d);
  EqModuleInvariants m;
  m.free_rank = d.cols - 2 * s.rank;
  for (int e : s.exponents)
    if (e > 0) m.torsion_exponents.push_back(e);
  m.generator_count = m.free_rank + static_cast<int>(m.torsion_exponents.size());
  return m;
}

EqModuleInvariants group_cohomology(const InvolutiveComplex& w) { return local_module_invariants(borel_complex(w).d); }

int tate_dimension(const InvolutiveComplex& w) {
  GradedComplex b = borel_complex(w);
  return b.size() - 2 * frac_rank(b.d);
}

GradedComplex truncate_complex(const GradedComplex& c, int n) {
  const int m = c.size();
  std::vector<Generator> gens;
  for (int j = 0; j < n; ++j)
    for (int y = 0; y < m; ++y) {
      Generator g = c.gens[y];
      g.name = c.gens[y].name + ".h^" + std::to_string(j);
      g.degree = c.gens[y].degree + j;
      gens.push_back(g);
    }
  GradedComplex t = GradedComplex::make(Ring::GF2, c.grading, std::move(gens));
  for (int j = 0; j < n; ++j)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x)
        for (int e : c.d(x, y).exponents())
          if (j + e < n) t.d(x + (j + e) * m, y + j * m) += HPoly::one();
  return t;
}

namespace {

// Basis of {y in span(zs) : g(y) in S}, returned as vectors of the ambient space.
std::vector<BitVec> preimage(const std::vector<BitVec>& zs, const std::vector<BitVec>& gz,
                             const std::vector<BitVec>& s, int ambient) {
  const int m = static_cast<int>(zs.size());
  if (m == 0) return {};
  const int rows = gz[0].size();
  BitMatrix a(rows, m + static_cast<int>(s.size()));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < rows; ++i)
      if (gz[j].get(i)) a.set(i, j, true);
  for (size_t j = 0; j < s.size(); ++j)
    for (int i = 0; i < rows; ++i)
      if (s[j].get(i)) a.set(i, m + static_cast<int>(j), true);
  Span out(ambient);
  for (const auto& k : gf2_rank_kernel(a).kernel) {
    BitVec v(ambient);
    for (int j = 0; j < m; ++j)
      if (k.get(j)) v ^= zs[j];
    out.add(v);
  }
  return out.basis();
}

struct Level {
  BitMatrix d;
  CocycleData cd;
  int dim_h() const { return static_cast<int>(cd.cycles.size() - cd.boundaries.size()); }
};

Level level(const GradedComplex& c) {
  Level l{BitMatrix::from_poly(c.d), {}};
  l.cd = cocycles(l.d);
  return l;
}

using LinearFn = std::function<BitVec(const BitVec&)>;

// Exactness at Y of X -f-> Y -g-> Z on cohomology. Returns rank of f_*.
bool exact_at(const Level& x, const LinearFn& f, const Level& y, const LinearFn& g, const Level& z, int& rank_f) {
  Span img(y.d.rows());
  for (const auto& b : y.cd.boundaries) img.add(b);
  const int base = img.dim();
  for (const auto& c : x.cd.cycles) img.add(f(c));
  rank_f = img.dim() - base;
  std::vector<BitVec> gz;
  for (const auto& c : y.cd.cycles) gz.push_back(g(c));
  auto ker = preimage(y.cd.cycles, gz, z.cd.boundaries, y.d.rows());
  Span kspan(y.d.rows());
  for (const auto& v : ker) kspan.add(v);
  for (const auto& v : img.basis())
    if (!kspan.contains(v)) return false;
  return kspan.dim() == img.dim();
}

}  // namespace

USequenceReport verify_u_sequence(const InvolutiveComplex& w, int truncation) {
  if (truncation < 2) throw InputError("u-sequence truncation must be at least 2");
  GradedComplex c = borel_complex(w);
  const int m = c.size();
  const int n = truncation;
  Level a = level(truncate_complex(c, n - 1));
  Level b = level(truncate_complex(c, n));
  Level v = level(truncate_complex(c, 1));

  LinearFn mul_h = [&](const BitVec& x) {
    BitVec r(m * n);
    for (int i = 0; i < m * (n - 1); ++i)
      if (x.get(i)) r.set(i + m, true);
    return r;
  };
  LinearFn restrict_h0 = [&](const BitVec& x) {
    BitVec r(m);
    for (int i = 0; i < m; ++i) r.set(i, x.get(i));
    return r;
  };
  LinearFn connecting = [&](const BitVec& x) {
    BitVec lift(m * n);
    for (int i = 0; i < m; ++i) lift.set(i, x.get(i));
    BitVec db = b.d.apply(lift);
    BitVec r(m * (n - 1));
    for (int i = 0; i < m * (n - 1); ++i) r.set(i, db.get(i + m));
    return r;
  };

  USequenceReport rep;
  rep.truncation = n;
  rep.dim_h_lower = a.dim_h();
  rep.dim_h_upper = b.dim_h();
  rep.dim_h_v = v.dim_h();
  rep.exact_at_upper = exact_at(a, mul_h, b, restrict_h0, v, rep.rank_h);
  rep.exact_at_v = exact_at(b, restrict_h0, v, connecting, a, rep.rank_restrict);
  rep.exact_at_lower = exact_at(v, connecting, a, mul_h, b, rep.rank_connecting);
  return rep;
}

SmithBoundReport smith_bound_check(const InvolutiveComplex& w) {
  validate_involutive(w);
  BitMatrix d = BitMatrix::from_poly(w.complex.d);
  BitMatrix ind = induced_on_cohomology(d, w.iota);
  SmithBoundReport rep;
  rep.invariant_dim = static_cast<int>(gf2_rank_kernel(ind + BitMatrix::identity(ind.rows())).kernel.size());
  EqModuleInvariants g = group_cohomology(w);
  rep.generator_count = g.generator_count;
  rep.free_rank = g.free_rank;
  return rep;
}

namespace {

PolyVec tensor(const BitVec& a, const BitVec& b) {
  const int n = a.size();
  PolyVec out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    if (a.get(i))
      for (int j = 0; j < n; ++j)
        if (b.get(j)) out[pair_index(n, i, j)] = HPoly::one();
  return out;
}

PolyVec add(PolyVec a, const PolyVec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

}  // namespace

PolyVec squaring_map(const GradedComplex& v, const BitVec& c) {
  BitMatrix d = BitMatrix::from_poly(v.d);
  if (!d.apply(c).is_zero()) throw InputError("squaring_map: argument is not a cocycle");
  return tensor(c, c);
}

bool squaring_well_defined(const GradedComplex& v, const BitVec& c, const BitVec& w) {
  BitMatrix d = BitMatrix::from_poly(v.d);
  BitVec dw = d.apply(w);
  BitVec c2 = c ^ dw;
  GradedComplex borel = borel_complex(tensor_square_swap(v));
  PolyVec diff = add(squaring_map(v, c2), squaring_map(v, c));
  PolyVec x = add(add(tensor(c, w), tensor(w, c)), tensor(w, dw));
  PolyVec ww = tensor(w, w);
  for (auto& e : ww) e = e.shift_up(1);
  x = add(x, ww);
  bool formula = equihf::apply(borel.d, x) == diff;
  return formula && in_image_pid(borel.d, diff);
}

KaledinReport kaledin_check(const GradedComplex& v) {
  if (v.ring != Ring::GF2) throw InputError("kaledin_check needs a GF(2) complex");
  const int n = v.size();
  BitMatrix d = BitMatrix::from_poly(v.d);
  CocycleData cd = cocycles(d);
  Quotient q(cd.cycles, cd.boundaries, n);
  GradedComplex borel = borel_complex(tensor_square_swap(v));
  KaledinReport rep;
  rep.dim_h = q.dim();
  const int base_rank = frac_rank(borel.d);
  rep.dim_tate = n * n - 2 * base_rank;
  rep.squares = PolyMatrix(n * n, q.dim());
  PolyMatrix aug(n * n, n * n + q.dim());
  for (int i = 0; i < n * n; ++i)
    for (int j = 0; j < n * n; ++j) aug(i, j) = borel.d(i, j);
  for (int k = 0; k < q.dim(); ++k) {
    PolyVec s = squaring_map(v, q.lifts()[k]);
    for (int i = 0; i < n * n; ++i) {
      rep.squares(i, k) = s[i];
      aug(i, n * n + k) = s[i];
    }
  }
  rep.image_rank = frac_rank(aug) - base_rank;
  return rep;
}

}  // namespace equihf
