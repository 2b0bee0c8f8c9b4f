#include "equihf/scalars.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "equihf/gf2.hpp"

namespace equihf {

HPoly HPoly::monomial(int k) {
  if (k < 0) throw std::invalid_argument("negative exponent");
  HPoly p;
  p.w_.assign(static_cast<size_t>(k / 64 + 1), 0);
  p.w_[k / 64] = std::uint64_t{1} << (k % 64);
  return p;
}

HPoly HPoly::from_exponents(const std::vector<int>& exps) {
  HPoly p;
  for (int e : exps) p += monomial(e);
  return p;
}

HPoly HPoly::parse(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw std::invalid_argument("empty polynomial");
  HPoly p;
  size_t pos = 0;
  while (pos <= t.size()) {
    size_t next = t.find('+', pos);
    if (next == std::string::npos) next = t.size();
    std::string term = t.substr(pos, next - pos);
    if (term == "0") {
    } else if (term == "1") {
      p += one();
    } else if (term == "h") {
      p += monomial(1);
    } else if (term.size() > 2 && term[0] == 'h' && term[1] == '^') {
      std::string e = term.substr(2);
      if (e.empty() || !std::all_of(e.begin(), e.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("bad exponent in polynomial '" + s + "'");
      p += monomial(std::stoi(e));
    } else {
      throw std::invalid_argument("bad polynomial term '" + term + "' in '" + s + "'");
    }
    pos = next + 1;
  }
  return p;
}

void HPoly::normalize() {
  while (!w_.empty() && w_.back() == 0) w_.pop_back();
}

int HPoly::degree() const {
  if (w_.empty()) return -1;
  return static_cast<int>((w_.size() - 1) * 64 + 63 - std::countl_zero(w_.back()));
}

int HPoly::valuation() const {
  for (size_t k = 0; k < w_.size(); ++k)
    if (w_[k]) return static_cast<int>(k * 64 + std::countr_zero(w_[k]));
  return kInfValuation;
}

bool HPoly::coeff(int k) const {
  if (k < 0 || static_cast<size_t>(k / 64) >= w_.size()) return false;
  return (w_[k / 64] >> (k % 64)) & 1u;
}

void HPoly::set_coeff(int k, bool b) {
  if (coeff(k) != b) *this += monomial(k);
}

std::vector<int> HPoly::exponents() const {
  std::vector<int> out;
  for (size_t k = 0; k < w_.size(); ++k) {
    std::uint64_t x = w_[k];
    while (x) {
      out.push_back(static_cast<int>(k * 64 + std::countr_zero(x)));
      x &= x - 1;
    }
  }
  return out;
}

HPoly HPoly::operator+(const HPoly& o) const {
  HPoly r = *this;
  r += o;
  return r;
}

HPoly& HPoly::operator+=(const HPoly& o) {
  if (o.w_.size() > w_.size()) w_.resize(o.w_.size(), 0);
  for (size_t k = 0; k < o.w_.size(); ++k) w_[k] ^= o.w_[k];
  normalize();
  return *this;
}

HPoly HPoly::operator*(const HPoly& o) const {
  if (is_zero() || o.is_zero()) return HPoly();
  HPoly r;
  r.w_.assign(w_.size() + o.w_.size(), 0);
  for (int e : exponents()) {
    int ws = e / 64, bs = e % 64;
    for (size_t k = 0; k < o.w_.size(); ++k) {
      std::uint64_t x = o.w_[k];
      if (!x) continue;
      r.w_[k + ws] ^= x << bs;
      if (bs) r.w_[k + ws + 1] ^= x >> (64 - bs);
    }
  }
  r.normalize();
  return r;
}

bool HPoly::operator<(const HPoly& o) const {
  if (w_.size() != o.w_.size()) return w_.size() < o.w_.size();
  for (size_t k = w_.size(); k-- > 0;)
    if (w_[k] != o.w_[k]) return w_[k] < o.w_[k];
  return false;
}

HPoly HPoly::shift_up(int k) const {
  if (is_zero() || k == 0) return *this;
  if (k < 0) return shift_down(-k);
  HPoly r;
  int ws = k / 64, bs = k % 64;
  r.w_.assign(w_.size() + ws + 1, 0);
  for (size_t i = 0; i < w_.size(); ++i) {
    r.w_[i + ws] ^= w_[i] << bs;
    if (bs) r.w_[i + ws + 1] ^= w_[i] >> (64 - bs);
  }
  r.normalize();
  return r;
}

HPoly HPoly::shift_down(int k) const {
  if (is_zero() || k == 0) return *this;
  if (k < 0) return shift_up(-k);
  int ws = k / 64, bs = k % 64;
  if (static_cast<size_t>(ws) >= w_.size()) return HPoly();
  HPoly r;
  r.w_.assign(w_.size() - ws, 0);
  for (size_t i = 0; i < r.w_.size(); ++i) {
    r.w_[i] = w_[i + ws] >> bs;
    if (bs && i + ws + 1 < w_.size()) r.w_[i] |= w_[i + ws + 1] << (64 - bs);
  }
  r.normalize();
  return r;
}

HPoly HPoly::truncate(int n) const {
  if (n <= 0) return HPoly();
  HPoly r = *this;
  size_t words = static_cast<size_t>((n + 63) / 64);
  if (r.w_.size() > words) r.w_.resize(words);
  if (n % 64 && r.w_.size() == words) r.w_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  r.normalize();
  return r;
}

std::optional<std::pair<HPoly, HPoly>> HPoly::try_divmod(const HPoly& b) const {
  if (b.is_zero()) return std::nullopt;
  HPoly q, r = *this;
  int db = b.degree();
  while (!r.is_zero() && r.degree() >= db) {
    int s = r.degree() - db;
    q += monomial(s);
    r += b.shift_up(s);
  }
  return std::make_pair(q, r);
}

std::pair<HPoly, HPoly> HPoly::divmod(const HPoly& b) const {
  auto r = try_divmod(b);
  if (!r) throw std::domain_error("division by the zero polynomial");
  return *r;
}

bool HPoly::divides(const HPoly& b) const {
  if (is_zero()) return b.is_zero();
  return b.divmod(*this).second.is_zero();
}

std::string HPoly::str() const {
  if (is_zero()) return "0";
  std::string s;
  for (int e : exponents()) {
    if (!s.empty()) s += "+";
    if (e == 0) s += "1";
    else if (e == 1) s += "h";
    else s += "h^" + std::to_string(e);
  }
  return s;
}

HPoly gcd(HPoly a, HPoly b) {
  while (!b.is_zero()) {
    HPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

HPoly lcm(const HPoly& a, const HPoly& b) {
  if (a.is_zero() || b.is_zero()) return HPoly();
  return (a / gcd(a, b)) * b;
}

HRational::HRational(const HPoly& n, const HPoly& d) {
  if (d.is_zero()) throw std::domain_error("zero denominator");
  if (n.is_zero()) {
    den_ = HPoly::one();
    return;
  }
  HPoly g = gcd(n, d);
  num_ = n / g;
  den_ = d / g;
}

HRational HRational::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return HRational(HPoly::parse(s));
  return HRational(HPoly::parse(s.substr(0, slash)), HPoly::parse(s.substr(slash + 1)));
}

HRational HRational::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  return HRational(den_, num_);
}

HRational HRational::operator+(const HRational& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_ == o.den_) return HRational(num_ + o.num_, den_);
  return HRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

HRational HRational::operator*(const HRational& o) const {
  if (is_zero() || o.is_zero()) return HRational();
  // cross-cancel first to keep degrees small
  HPoly g1 = gcd(num_, o.den_), g2 = gcd(o.num_, den_);
  HRational r;
  r.num_ = (num_ / g1) * (o.num_ / g2);
  r.den_ = (den_ / g2) * (o.den_ / g1);
  return r;
}

std::string HRational::str() const {
  if (den_.is_one()) return num_.str();
  return num_.str() + "/" + den_.str();
}

FracMatrix to_frac(const PolyMatrix& m) {
  FracMatrix f(m.rows, m.cols);
  for (size_t k = 0; k < m.a.size(); ++k) f.a[k] = HRational(m.a[k]);
  return f;
}

PolyVec apply(const PolyMatrix& m, const PolyVec& v) {
  if (static_cast<int>(v.size()) != m.cols) throw std::invalid_argument("apply: dimension mismatch");
  PolyVec r(m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!m(i, j).is_zero() && !v[j].is_zero()) r[i] += m(i, j) * v[j];
  return r;
}

PolyMatrix poly_matrix_from_strings(const std::vector<std::vector<std::string>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  PolyMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ragged matrix");
    for (int j = 0; j < c; ++j) m(i, j) = HPoly::parse(rows[i][j]);
  }
  return m;
}

std::vector<std::vector<std::string>> poly_matrix_to_strings(const PolyMatrix& m) {
  std::vector<std::vector<std::string>> out(m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[i].push_back(m(i, j).str());
  return out;
}

PolyMatrix truncate(const PolyMatrix& m, int n) {
  PolyMatrix r = m;
  for (auto& x : r.a) x = x.truncate(n);
  return r;
}

PolyMatrix reduce_mod_h(const PolyMatrix& m) { return truncate(m, 1); }

FracRankKernel frac_rank_kernel(const FracMatrix& m) {
  FracMatrix a = m;
  std::vector<int> piv;
  int r = 0;
  for (int c = 0; c < a.cols && r < a.rows; ++c) {
    int p = -1;
    for (int i = r; i < a.rows; ++i)
      if (!a(i, c).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    for (int j = 0; j < a.cols; ++j) std::swap(a(p, j), a(r, j));
    HRational inv = a(r, c).inverse();
    for (int j = c; j < a.cols; ++j) a(r, j) = a(r, j) * inv;
    for (int i = 0; i < a.rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      HRational f = a(i, c);
      for (int j = c; j < a.cols; ++j)
        if (!a(r, j).is_zero()) a(i, j) = a(i, j) + f * a(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  FracRankKernel out;
  out.rank = r;
  std::vector<bool> is_piv(a.cols, false);
  for (int c : piv) is_piv[c] = true;
  for (int f = 0; f < a.cols; ++f) {
    if (is_piv[f]) continue;
    FracVec v(a.cols);
    v[f] = HRational(HPoly::one());
    for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = a(static_cast<int>(k), f);
    out.kernel.push_back(v);
  }
  return out;
}

FracRankKernel frac_rank_kernel(const PolyMatrix& m) { return frac_rank_kernel(to_frac(m)); }

int frac_rank(const PolyMatrix& m) {
  // Fraction-free elimination; row contents are divided out to bound degrees.
  PolyMatrix a = m;
  int r = 0;
  for (int c = 0; c < a.cols && r < a.rows; ++c) {
    int p = -1;
    for (int i = r; i < a.rows; ++i)
      if (!a(i, c).is_zero() && (p < 0 || a(i, c).degree() < a(p, c).degree())) p = i;
    if (p < 0) continue;
    for (int j = 0; j < a.cols; ++j) std::swap(a(p, j), a(r, j));
    for (int i = r + 1; i < a.rows; ++i) {
      if (a(i, c).is_zero()) continue;
      HPoly g = gcd(a(r, c), a(i, c));
      HPoly fr = a(i, c) / g, fi = a(r, c) / g;
      HPoly content;
      for (int j = c; j < a.cols; ++j) {
        a(i, j) = fi * a(i, j) + fr * a(r, j);
        content = gcd(content, a(i, j));
      }
      if (!content.is_zero() && !content.is_one())
        for (int j = c; j < a.cols; ++j) a(i, j) = a(i, j) / content;
    }
    ++r;
  }
  return r;
}

namespace {

void row_add(PolyMatrix& d, int i, int j, const HPoly& q, const HPoly& u) {
  for (int c = 0; c < d.cols; ++c) {
    HPoly v = u.is_one() ? d(i, c) : u * d(i, c);
    if (!q.is_zero() && !d(j, c).is_zero()) v += q * d(j, c);
    d(i, c) = std::move(v);
  }
}

void col_add(PolyMatrix& d, int i, int j, const HPoly& q, const HPoly& u) {
  for (int r = 0; r < d.rows; ++r) {
    HPoly v = u.is_one() ? d(r, i) : u * d(r, i);
    if (!q.is_zero() && !d(r, j).is_zero()) v += q * d(r, j);
    d(r, i) = std::move(v);
  }
}

void apply_op(PolyMatrix& d, const SmithOp& op) {
  switch (op.kind) {
    case SmithOp::SwapRows:
      for (int c = 0; c < d.cols; ++c) std::swap(d(op.i, c), d(op.j, c));
      break;
    case SmithOp::SwapCols:
      for (int r = 0; r < d.rows; ++r) std::swap(d(r, op.i), d(r, op.j));
      break;
    case SmithOp::AddRow:
      row_add(d, op.i, op.j, op.q, op.u);
      break;
    case SmithOp::AddCol:
      col_add(d, op.i, op.j, op.q, op.u);
      break;
    case SmithOp::ScaleRow:
      for (int c = 0; c < d.cols; ++c) {
        auto [q, rem] = d(op.i, c).divmod(op.u);
        if (!rem.is_zero()) throw std::logic_error("ScaleRow: inexact division");
        d(op.i, c) = q;
      }
      break;
    case SmithOp::ScaleCol:
      for (int r = 0; r < d.rows; ++r) {
        auto [q, rem] = d(r, op.i).divmod(op.u);
        if (!rem.is_zero()) throw std::logic_error("ScaleCol: inexact division");
        d(r, op.i) = q;
      }
      break;
  }
}

struct Reducer {
  PolyMatrix d;
  std::vector<SmithOp> ops;
  void run(const SmithOp& op) {
    apply_op(d, op);
    ops.push_back(op);
  }
  void swap_into(int t, int i, int j) {
    if (i != t) run({SmithOp::SwapRows, t, i, {}, {}});
    if (j != t) run({SmithOp::SwapCols, t, j, {}, {}});
  }
};

// Pivot search over the trailing submatrix; key(entry) smaller is better.
template <class Key>
bool find_pivot(const PolyMatrix& d, int t, Key key, int& pi, int& pj) {
  pi = pj = -1;
  int best = 0;
  for (int i = t; i < d.rows; ++i)
    for (int j = t; j < d.cols; ++j) {
      if (d(i, j).is_zero()) continue;
      int k = key(d(i, j));
      if (pi < 0 || k < best) {
        best = k;
        pi = i;
        pj = j;
      }
    }
  return pi >= 0;
}

}  // namespace

SmithResult smith_pid(const PolyMatrix& m) {
  Reducer R{m, {}};
  auto deg = [](const HPoly& p) { return p.degree(); };
  int t = 0;
  const int lim = std::min(m.rows, m.cols);
  while (t < lim) {
    int pi, pj;
    if (!find_pivot(R.d, t, deg, pi, pj)) break;
    R.swap_into(t, pi, pj);
    bool restart = false;
    for (int i = t + 1; i < R.d.rows && !restart; ++i) {
      if (R.d(i, t).is_zero()) continue;
      HPoly q = R.d(i, t) / R.d(t, t);
      R.run({SmithOp::AddRow, i, t, q, HPoly::one()});
      if (!R.d(i, t).is_zero()) restart = true;
    }
    for (int j = t + 1; j < R.d.cols && !restart; ++j) {
      if (R.d(t, j).is_zero()) continue;
      HPoly q = R.d(t, j) / R.d(t, t);
      R.run({SmithOp::AddCol, j, t, q, HPoly::one()});
      if (!R.d(t, j).is_zero()) restart = true;
    }
    if (restart) continue;
    // divisibility: pull any offending row into the pivot row
    for (int i = t + 1; i < R.d.rows && !restart; ++i)
      for (int j = t + 1; j < R.d.cols; ++j)
        if (!R.d(t, t).divides(R.d(i, j))) {
          R.run({SmithOp::AddRow, t, i, HPoly::one(), HPoly::one()});
          restart = true;
          break;
        }
    if (restart) continue;
    ++t;
  }
  SmithResult out;
  out.rank = t;
  for (int k = 0; k < t; ++k) {
    out.invariant_factors.push_back(R.d(k, k));
    out.exponents.push_back(R.d(k, k).valuation());
  }
  std::sort(out.exponents.begin(), out.exponents.end());
  out.diagonal = std::move(R.d);
  out.ops = std::move(R.ops);
  return out;
}

SmithResult smith_local(const PolyMatrix& m) {
  Reducer R{m, {}};
  auto val = [](const HPoly& p) { return p.valuation(); };
  int t = 0;
  const int lim = std::min(m.rows, m.cols);
  while (t < lim) {
    int pi, pj;
    if (!find_pivot(R.d, t, val, pi, pj)) break;
    R.swap_into(t, pi, pj);
    const int a = R.d(t, t).valuation();
    const HPoly u = R.d(t, t).unit_part();
    for (int i = t + 1; i < R.d.rows; ++i) {
      if (R.d(i, t).is_zero()) continue;
      R.run({SmithOp::AddRow, i, t, R.d(i, t).shift_down(a), u});
    }
    for (int j = t + 1; j < R.d.cols; ++j) {
      if (R.d(t, j).is_zero()) continue;
      R.run({SmithOp::AddCol, j, t, R.d(t, j).shift_down(a), u});
    }
    // strip unit contents from the remaining rows and columns
    for (int i = t + 1; i < R.d.rows; ++i) {
      HPoly g;
      for (int j = t + 1; j < R.d.cols; ++j) g = gcd(g, R.d(i, j));
      if (g.is_zero()) continue;
      HPoly gu = g.unit_part();
      if (!gu.is_one()) R.run({SmithOp::ScaleRow, i, 0, {}, gu});
    }
    for (int j = t + 1; j < R.d.cols; ++j) {
      HPoly g;
      for (int i = t + 1; i < R.d.rows; ++i) g = gcd(g, R.d(i, j));
      if (g.is_zero()) continue;
      HPoly gu = g.unit_part();
      if (!gu.is_one()) R.run({SmithOp::ScaleCol, j, 0, {}, gu});
    }
    ++t;
  }
  SmithResult out;
  out.rank = t;
  for (int k = 0; k < t; ++k) out.exponents.push_back(R.d(k, k).valuation());
  std::sort(out.exponents.begin(), out.exponents.end());
  for (int e : out.exponents) out.invariant_factors.push_back(HPoly::monomial(e));
  out.diagonal = std::move(R.d);
  out.ops = std::move(R.ops);
  return out;
}

PolyMatrix replay_smith(const PolyMatrix& m, const std::vector<SmithOp>& ops) {
  PolyMatrix d = m;
  for (const auto& op : ops) apply_op(d, op);
  return d;
}

SmithTransforms smith_transforms(const PolyMatrix& m, const std::vector<SmithOp>& ops) {
  SmithTransforms t{PolyMatrix::identity(m.rows), PolyMatrix::identity(m.cols)};
  for (const auto& op : ops) {
    if (op.kind == SmithOp::ScaleRow || op.kind == SmithOp::ScaleCol || (!op.u.is_zero() && !op.u.is_one()))
      throw std::invalid_argument("smith_transforms: certificate is not unimodular");
    switch (op.kind) {
      case SmithOp::SwapRows:
      case SmithOp::AddRow:
        apply_op(t.U, op);
        break;
      case SmithOp::SwapCols:
      case SmithOp::AddCol:
        apply_op(t.V, op);
        break;
      default:
        break;
    }
  }
  return t;
}

bool in_image_pid(const PolyMatrix& m, const PolyVec& v) {
  if (static_cast<int>(v.size()) != m.rows) throw std::invalid_argument("in_image_pid: dimension mismatch");
  SmithResult s = smith_pid(m);
  SmithTransforms t = smith_transforms(m, s.ops);
  PolyVec w = equihf::apply(t.U, v);
  for (int k = 0; k < m.rows; ++k) {
    if (k < s.rank) {
      if (!s.diagonal(k, k).divides(w[k])) return false;
    } else if (!w[k].is_zero()) {
      return false;
    }
  }
  return true;
}

int truncated_coker_dim(const PolyMatrix& m, int n) {
  BitMatrix b(m.rows * n, m.cols * n);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      for (int e : m(i, j).exponents())
        for (int s = 0; s + e < n; ++s) b.set(i * n + s + e, j * n + s, true);
  return m.rows * n - gf2_rank(b);
}

}  // namespace equihf
