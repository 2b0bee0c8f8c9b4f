#include "equihf/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace equihf {

bool BitVec::is_zero() const {
  for (auto x : w_)
    if (x) return false;
  return true;
}

int BitVec::first_set() const {
  for (size_t k = 0; k < w_.size(); ++k)
    if (w_[k]) return static_cast<int>(k * 64 + std::countr_zero(w_[k]));
  return -1;
}

int BitVec::popcount() const {
  int c = 0;
  for (auto x : w_) c += std::popcount(x);
  return c;
}

bool BitVec::dot(const BitVec& o) const {
  int c = 0;
  for (size_t k = 0; k < w_.size(); ++k) c += std::popcount(w_[k] & o.w_[k]);
  return c & 1;
}

std::string BitVec::str() const {
  std::string s;
  for (int i = 0; i < n_; ++i) s.push_back(get(i) ? '1' : '0');
  return s;
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_poly(const PolyMatrix& m) {
  BitMatrix b(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      const HPoly& e = m(i, j);
      if (e.is_zero()) continue;
      if (!e.is_one()) throw std::invalid_argument("entry " + e.str() + " is not in GF(2)");
      b.set(i, j, true);
    }
  return b;
}

PolyMatrix BitMatrix::to_poly() const {
  PolyMatrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (get(i, j)) m(i, j) = HPoly::one();
  return m;
}

BitVec BitMatrix::col(int j) const {
  BitVec v(rows_);
  for (int i = 0; i < rows_; ++i)
    if (get(i, j)) v.set(i, true);
  return v;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (get(i, j)) t.set(j, i, true);
  return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("bit matrix product: dimension mismatch");
  BitMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k)
      if (get(i, k)) r.row_[i] ^= o.row_[k];
  return r;
}

BitMatrix BitMatrix::operator+(const BitMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("bit matrix sum: dimension mismatch");
  BitMatrix r = *this;
  for (int i = 0; i < rows_; ++i) r.row_[i] ^= o.row_[i];
  return r;
}

BitVec BitMatrix::apply(const BitVec& v) const {
  BitVec r(rows_);
  for (int i = 0; i < rows_; ++i)
    if (row_[i].dot(v)) r.set(i, true);
  return r;
}

bool BitMatrix::is_zero() const {
  for (const auto& r : row_)
    if (!r.is_zero()) return false;
  return true;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(BitMatrix& m) {
  std::vector<int> piv;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m.get(i, c)) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m.row(p), m.row(r));
    for (int i = 0; i < m.rows(); ++i)
      if (i != r && m.get(i, c)) m.row(i) ^= m.row(r);
    piv.push_back(c);
    ++r;
  }
  return piv;
}

}  // namespace

Gf2RankKernel gf2_rank_kernel(const BitMatrix& m) {
  BitMatrix a = m;
  auto piv = rref(a);
  Gf2RankKernel out;
  out.rank = static_cast<int>(piv.size());
  std::vector<bool> is_piv(m.cols(), false);
  for (int c : piv) is_piv[c] = true;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    BitVec v(m.cols());
    v.set(f, true);
    for (size_t k = 0; k < piv.size(); ++k)
      if (a.get(static_cast<int>(k), f)) v.set(piv[k], true);
    out.kernel.push_back(v);
  }
  return out;
}

int gf2_rank(const BitMatrix& m) {
  BitMatrix a = m;
  return static_cast<int>(rref(a).size());
}

bool Span::add(const BitVec& v) {
  BitVec r = reduce(v);
  int p = r.first_set();
  if (p < 0) return false;
  basis_.push_back(r);
  pivot_.push_back(p);
  return true;
}

BitVec Span::reduce(const BitVec& v) const {
  BitVec r = v;
  for (size_t k = 0; k < basis_.size(); ++k)
    if (r.get(pivot_[k])) r ^= basis_[k];
  return r;
}

bool Span::contains(const BitVec& v) const { return reduce(v).is_zero(); }

int span_dim(const std::vector<BitVec>& vs, int n) {
  Span s(n);
  for (const auto& v : vs) s.add(v);
  return s.dim();
}

Quotient::Quotient(const std::vector<BitVec>& w, const std::vector<BitVec>& u, int n) : n_(n) {
  auto push = [&](const BitVec& v, int lift) {
    BitVec r = v;
    for (size_t k = 0; k < ech_.size(); ++k)
      if (r.get(pivot_[k])) r ^= ech_[k];
    int p = r.first_set();
    if (p < 0) return;
    ech_.push_back(r);
    pivot_.push_back(p);
    lift_index_.push_back(lift);
    if (lift >= 0) lifts_.push_back(r);
  };
  for (const auto& v : u) push(v, -1);
  for (const auto& v : w) push(v, static_cast<int>(lifts_.size()));
}

BitVec Quotient::coords(const BitVec& v) const {
  BitVec r = v;
  BitVec c(dim());
  for (size_t k = 0; k < ech_.size(); ++k)
    if (r.get(pivot_[k])) {
      r ^= ech_[k];
      if (lift_index_[k] >= 0) c.flip(lift_index_[k]);
    }
  if (!r.is_zero()) throw std::logic_error("Quotient::coords: vector outside W + U");
  return c;
}

namespace {

std::optional<BitVec> solve_impl(const BitMatrix& a, const BitVec& b, std::mt19937_64* rng) {
  BitMatrix aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j)
      if (a.get(i, j)) aug.set(i, j, true);
    if (b.get(i)) aug.set(i, a.cols(), true);
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  std::vector<bool> is_piv(a.cols(), false);
  for (int c : piv) is_piv[c] = true;
  BitVec x(a.cols());
  if (rng) {
    std::bernoulli_distribution coin(0.5);
    for (int f = 0; f < a.cols(); ++f)
      if (!is_piv[f] && coin(*rng)) x.set(f, true);
  }
  for (size_t k = 0; k < piv.size(); ++k) {
    const BitVec& row = aug.row(static_cast<int>(k));
    bool val = row.get(a.cols());
    for (int f = 0; f < a.cols(); ++f)
      if (!is_piv[f] && x.get(f) && row.get(f)) val = !val;
    x.set(piv[k], val);
  }
  return x;
}

}  // namespace

std::optional<BitVec> gf2_solve(const BitMatrix& a, const BitVec& b) { return solve_impl(a, b, nullptr); }

std::optional<BitVec> gf2_solve_random(const BitMatrix& a, const BitVec& b, std::mt19937_64& rng) {
  return solve_impl(a, b, &rng);
}

std::optional<BitMatrix> gf2_inverse(const BitMatrix& a) {
  const int n = a.rows();
  if (a.cols() != n) return std::nullopt;
  if (n == 0) return BitMatrix(0, 0);
  BitMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (a.get(i, j)) aug.set(i, j, true);
    aug.set(i, n + i, true);
  }
  auto piv = rref(aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  BitMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (aug.get(i, n + j)) inv.set(i, j, true);
  return inv;
}

}  // namespace equihf
