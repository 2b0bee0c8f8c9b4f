#include "equihf/complexes.hpp"

#include <algorithm>
#include <set>

namespace equihf {

std::string ring_name(Ring r) {
  switch (r) {
    case Ring::GF2: return "GF2";
    case Ring::Poly: return "GF2[h]";
    case Ring::Frac: return "GF2(h)";
  }
  return "?";
}

Ring parse_ring(const std::string& s) {
  if (s == "GF2" || s == "F2" || s == "gf2") return Ring::GF2;
  if (s == "GF2[h]" || s == "poly" || s == "F2[h]") return Ring::Poly;
  if (s == "GF2(h)" || s == "frac" || s == "F2(h)") return Ring::Frac;
  throw InputError("unknown scalar ring '" + s + "'");
}

int GradedComplex::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (gens[i].name == name) return i;
  return -1;
}

GradedComplex GradedComplex::make(Ring r, Grading g, std::vector<Generator> gens) {
  GradedComplex c;
  c.ring = r;
  c.grading = g;
  c.gens = std::move(gens);
  if (g == Grading::Z2)
    for (auto& x : c.gens) x.degree = ((x.degree % 2) + 2) % 2;
  c.d = PolyMatrix(c.size(), c.size());
  return c;
}

bool degree_ok(const GradedComplex& c, int target, int source, const HPoly& entry) {
  if (c.ring == Ring::Frac) return true;
  for (int k : entry.exponents()) {
    int lhs = c.gens[target].degree + k;
    int rhs = c.gens[source].degree + 1;
    if (c.grading == Grading::Z ? lhs != rhs : ((lhs - rhs) % 2 + 2) % 2 != 0) return false;
  }
  return true;
}

CheckReport check_complex(const GradedComplex& c) {
  CheckReport rep;
  const int n = c.size();
  if (c.d.rows != n || c.d.cols != n) {
    rep.structural_ok = false;
    rep.structural.push_back("differential is " + std::to_string(c.d.rows) + "x" + std::to_string(c.d.cols) +
                             " but there are " + std::to_string(n) + " generators");
    return rep;
  }
  std::set<std::string> names;
  for (const auto& g : c.gens)
    if (!names.insert(g.name).second) {
      rep.structural_ok = false;
      rep.structural.push_back("duplicate generator name '" + g.name + "'");
    }
  if (c.ring == Ring::GF2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!c.d(i, j).is_zero() && !c.d(i, j).is_one()) {
          rep.structural_ok = false;
          rep.structural.push_back("entry " + c.d(i, j).str() + " at (" + c.gens[i].name + ", " + c.gens[j].name +
                                   ") is not in GF(2)");
        }
  rep.d_squared_zero = (c.d * c.d).is_zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const HPoly& e = c.d(i, j);
      if (e.is_zero()) continue;
      if (!degree_ok(c, i, j, e))
        rep.grading_violations.push_back("d(" + c.gens[j].name + ") contains " + e.str() + "*" + c.gens[i].name);
      if (c.strict_action && i != j && c.gens[i].action && c.gens[j].action) {
        // h^0 terms must raise the action; higher powers of h may preserve it
        const Action& at = *c.gens[i].action;
        const Action& as = *c.gens[j].action;
        bool bad = e.constant_term() ? !(at > as) : (at < as);
        if (bad)
          rep.action_violations.push_back("d(" + c.gens[j].name + ") -> " + c.gens[i].name + " does not increase action");
      }
    }
  return rep;
}

namespace {

std::vector<int> degree_set(const GradedComplex& c) {
  std::set<int> s;
  for (const auto& g : c.gens) s.insert(g.degree);
  return {s.begin(), s.end()};
}

int next_degree(const GradedComplex& c, int k) { return c.grading == Grading::Z ? k + 1 : (k + 1) % 2; }
int prev_degree(const GradedComplex& c, int k) { return c.grading == Grading::Z ? k - 1 : (k + 1) % 2; }

BitMatrix submatrix(const BitMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  BitMatrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      if (m.get(rows[i], cols[j])) s.set(static_cast<int>(i), static_cast<int>(j), true);
  return s;
}

std::vector<int> gens_of_degree(const GradedComplex& c, int k) {
  std::vector<int> out;
  for (int i = 0; i < c.size(); ++i)
    if (c.gens[i].degree == k) out.push_back(i);
  return out;
}

}  // namespace

CocycleData cocycles(const BitMatrix& d) {
  CocycleData out;
  out.cycles = gf2_rank_kernel(d).kernel;
  Span b(d.rows());
  for (int j = 0; j < d.cols(); ++j) b.add(d.col(j));
  out.boundaries = b.basis();
  return out;
}

BitMatrix induced_on_cohomology(const BitMatrix& d, const BitMatrix& f) {
  CocycleData cd = cocycles(d);
  Quotient q(cd.cycles, cd.boundaries, d.rows());
  BitMatrix m(q.dim(), q.dim());
  for (int j = 0; j < q.dim(); ++j) {
    BitVec c = q.coords(f.apply(q.lifts()[j]));
    for (int i = 0; i < q.dim(); ++i)
      if (c.get(i)) m.set(i, j, true);
  }
  return m;
}

CohomologyResult cohomology(const GradedComplex& c) {
  CohomologyResult res;
  res.ring = c.ring;
  const int n = c.size();
  if (c.ring == Ring::GF2) {
    BitMatrix d = BitMatrix::from_poly(c.d);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    for (int k : degree_set(c)) {
      auto gk = gens_of_degree(c, k);
      auto gp = gens_of_degree(c, prev_degree(c, k));
      int out_rank = gf2_rank(submatrix(d, all, gk));
      int in_rank = gp.empty() ? 0 : gf2_rank(submatrix(d, gk, gp));
      int dim = static_cast<int>(gk.size()) - out_rank - in_rank;
      res.dims[k] = dim;
      res.total += dim;
    }
    res.free_rank = res.total;
  } else if (c.ring == Ring::Poly) {
    SmithResult s = smith_pid(c.d);
    res.free_rank = n - 2 * s.rank;
    res.total = res.free_rank;
    for (const auto& f : s.invariant_factors)
      if (f.degree() > 0) {
        res.invariant_factors.push_back(f);
        res.torsion_dim += f.degree();
      }
  } else {
    res.total = n - 2 * frac_rank(c.d);
    res.free_rank = res.total;
  }
  return res;
}

int pair_index(int n, int a, int b) { return a * n + b; }

InvolutiveComplex tensor_square_swap(const GradedComplex& v) {
  if (v.ring != Ring::GF2) throw InputError("tensor_square_swap needs a GF(2) complex");
  const int n = v.size();
  std::vector<Generator> gens;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Generator g;
      g.name = v.gens[a].name + "*" + v.gens[b].name;
      g.degree = v.gens[a].degree + v.gens[b].degree;
      if (v.gens[a].action && v.gens[b].action) g.action = *v.gens[a].action + *v.gens[b].action;
      gens.push_back(g);
    }
  InvolutiveComplex out{GradedComplex::make(Ring::GF2, v.grading, std::move(gens)), BitMatrix(n * n, n * n)};
  auto& t = out.complex.d;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int src = pair_index(n, a, b);
      for (int c = 0; c < n; ++c) {
        if (!v.d(c, a).is_zero()) t(pair_index(n, c, b), src) += v.d(c, a);
        if (!v.d(c, b).is_zero()) t(pair_index(n, a, c), src) += v.d(c, b);
      }
      out.iota.set(pair_index(n, b, a), src, true);
    }
  return out;
}

bool is_chain_map(const GradedComplex& src, const GradedComplex& dst, const ChainMap& f) {
  if (f.f.rows != dst.size() || f.f.cols != src.size()) return false;
  return f.f * src.d == dst.d * f.f;
}

PolyMatrix mapping_cone(const PolyMatrix& d_src, const PolyMatrix& d_dst, const PolyMatrix& f) {
  const int a = d_src.rows, b = d_dst.rows;
  PolyMatrix m(a + b, a + b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) m(i, j) = d_src(i, j);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) m(a + i, a + j) = d_dst(i, j);
    for (int j = 0; j < a; ++j) m(a + i, j) = f(i, j);
  }
  return m;
}

QuasiIsoReport quasi_iso_check(const GradedComplex& src, const GradedComplex& dst, const ChainMap& f) {
  QuasiIsoReport rep;
  rep.chain_map = is_chain_map(src, dst, f);
  if (!rep.chain_map) return rep;
  const int a = src.size(), b = dst.size();
  if (src.ring == Ring::GF2) {
    BitMatrix ds = BitMatrix::from_poly(src.d), dd = BitMatrix::from_poly(dst.d), fm = BitMatrix::from_poly(f.f);
    CocycleData cs = cocycles(ds), cd = cocycles(dd);
    rep.dim_source = static_cast<int>(cs.cycles.size() - cs.boundaries.size());
    rep.dim_target = static_cast<int>(cd.cycles.size() - cd.boundaries.size());
    Span s(b);
    for (const auto& v : cd.boundaries) s.add(v);
    int base = s.dim();
    for (const auto& z : cs.cycles) s.add(fm.apply(z));
    rep.induced_rank = s.dim() - base;
    rep.quasi_iso = rep.induced_rank == rep.dim_source && rep.induced_rank == rep.dim_target;
    return rep;
  }
  PolyMatrix cone = mapping_cone(src.d, dst.d, f.f);
  if (src.ring == Ring::Frac) {
    rep.dim_source = a - 2 * frac_rank(src.d);
    rep.dim_target = b - 2 * frac_rank(dst.d);
    int r = frac_rank(cone);
    rep.quasi_iso = 2 * r == a + b;
  } else {
    SmithResult s = smith_local(src.d), t = smith_local(dst.d), c = smith_local(cone);
    rep.dim_source = a - 2 * s.rank;
    rep.dim_target = b - 2 * t.rank;
    bool no_torsion = std::all_of(c.exponents.begin(), c.exponents.end(), [](int e) { return e == 0; });
    rep.quasi_iso = 2 * c.rank == a + b && no_torsion;
  }
  rep.induced_rank = rep.quasi_iso ? rep.dim_source : -1;
  return rep;
}

int SpectralPage::total() const {
  int t = 0;
  for (const auto& [k, v] : dims) t += v;
  return t;
}

namespace {

struct SSBuilder {
  const GradedComplex& c;
  const Filtration& f;
  BitMatrix d;
  int n;

  std::vector<BitVec> filtered(int p, int k) const {
    std::vector<BitVec> out;
    for (int g : gens_of_degree(c, k))
      if (f.weight[g] >= p) {
        BitVec v(n);
        v.set(g, true);
        out.push_back(v);
      }
    return out;
  }

  // Z_r^{p} in degree k; r < 0 gives F^p.
  std::vector<BitVec> z(int r, int p, int k) const {
    auto basis = filtered(p, k);
    if (r < 0 || basis.empty()) return basis;
    std::vector<int> rows;
    for (int g : gens_of_degree(c, next_degree(c, k)))
      if (f.weight[g] < p + r) rows.push_back(g);
    if (rows.empty()) return basis;
    BitMatrix a(static_cast<int>(rows.size()), static_cast<int>(basis.size()));
    for (size_t j = 0; j < basis.size(); ++j) {
      BitVec img = d.apply(basis[j]);
      for (size_t i = 0; i < rows.size(); ++i)
        if (img.get(rows[i])) a.set(static_cast<int>(i), static_cast<int>(j), true);
    }
    std::vector<BitVec> out;
    for (const auto& kv : gf2_rank_kernel(a).kernel) {
      BitVec v(n);
      for (size_t j = 0; j < basis.size(); ++j)
        if (kv.get(static_cast<int>(j))) v ^= basis[j];
      out.push_back(v);
    }
    return out;
  }

  Quotient page(int r, int p, int k) const {
    std::vector<BitVec> u = z(r - 1, p + 1, k);
    for (const auto& y : z(r - 1, p - r + 1, prev_degree(c, k))) u.push_back(d.apply(y));
    return Quotient(z(r, p, k), u, n);
  }
};

}  // namespace

SpectralSequence spectral_sequence(const GradedComplex& c, const Filtration& f) {
  if (c.ring != Ring::GF2) throw InputError("spectral_sequence needs a GF(2) complex");
  if (static_cast<int>(f.weight.size()) != c.size()) throw InputError("filtration has the wrong length");
  const int n = c.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!c.d(i, j).is_zero() && f.weight[i] < f.weight[j])
        throw InputError("filtration error: d(" + c.gens[j].name + ") hits " + c.gens[i].name + " of lower weight");
  SpectralSequence ss;
  if (n == 0) return ss;
  SSBuilder b{c, f, BitMatrix::from_poly(c.d), n};
  const int wmin = *std::min_element(f.weight.begin(), f.weight.end());
  const int wmax = *std::max_element(f.weight.begin(), f.weight.end());
  const int last = wmax - wmin + 1;
  auto degs = degree_set(c);
  for (int r = 0; r <= last; ++r) {
    SpectralPage pg;
    pg.r = r;
    std::map<std::pair<int, int>, Quotient> qs;
    for (int p = wmin; p <= wmax; ++p)
      for (int k : degs) {
        qs.emplace(std::make_pair(p, k), b.page(r, p, k));
        pg.dims[{p, k}] = qs.at({p, k}).dim();
      }
    for (const auto& [key, q] : qs) {
      auto [p, k] = key;
      auto tgt = qs.find({p + r, next_degree(c, k)});
      int rows = tgt == qs.end() ? 0 : tgt->second.dim();
      BitMatrix m(rows, q.dim());
      if (rows > 0)
        for (int j = 0; j < q.dim(); ++j) {
          BitVec co = tgt->second.coords(b.d.apply(q.lifts()[j]));
          for (int i = 0; i < rows; ++i)
            if (co.get(i)) m.set(i, j, true);
        }
      pg.d[key] = m;
    }
    ss.pages.push_back(std::move(pg));
  }
  // E_{r+1} = H(E_r, d_r)
  for (size_t r = 0; r + 1 < ss.pages.size(); ++r) {
    const auto& pg = ss.pages[r];
    for (const auto& [key, dim] : pg.dims) {
      auto [p, k] = key;
      int out_rank = gf2_rank(pg.d.at(key));
      int in_rank = 0;
      auto src = pg.d.find({p - static_cast<int>(r), prev_degree(c, k)});
      if (src != pg.d.end() && src->second.rows() > 0) in_rank = gf2_rank(src->second);
      if (dim - out_rank - in_rank != ss.pages[r + 1].dims.at(key)) ss.consistent = false;
    }
  }
  ss.e_infinity_total = ss.pages.back().total();
  ss.stable_page = static_cast<int>(ss.pages.size()) - 1;
  while (ss.stable_page > 0 && ss.pages[ss.stable_page - 1].dims == ss.pages.back().dims) --ss.stable_page;
  ss.cohomology_total = cohomology(c).total;
  ss.abutment_matches = ss.e_infinity_total == ss.cohomology_total;
  return ss;
}

}  // namespace equihf
