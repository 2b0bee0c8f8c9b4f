// Bit-packed linear algebra over GF(2).
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "equihf/scalars.hpp"

namespace equihf {

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(int n) : n_(n), w_((n + 63) / 64, 0) {}
  int size() const { return n_; }
  bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i, bool b) {
    if (b) w_[i >> 6] |= (std::uint64_t{1} << (i & 63));
    else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  void flip(int i) { w_[i >> 6] ^= (std::uint64_t{1} << (i & 63)); }
  BitVec& operator^=(const BitVec& o) {
    for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }
  BitVec operator^(const BitVec& o) const {
    BitVec r = *this;
    r ^= o;
    return r;
  }
  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool is_zero() const;
  int first_set() const;  // -1 if zero
  int popcount() const;
  bool dot(const BitVec& o) const;
  std::string str() const;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int r, int c) : rows_(r), cols_(c), row_(r, BitVec(c)) {}
  static BitMatrix identity(int n);
  static BitMatrix from_poly(const PolyMatrix& m);  // requires entries in {0,1}
  PolyMatrix to_poly() const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int i, int j) const { return row_[i].get(j); }
  void set(int i, int j, bool b) { row_[i].set(j, b); }
  void flip(int i, int j) { row_[i].flip(j); }
  const BitVec& row(int i) const { return row_[i]; }
  BitVec& row(int i) { return row_[i]; }
  BitVec col(int j) const;

  BitMatrix transpose() const;
  BitMatrix operator*(const BitMatrix& o) const;
  BitMatrix operator+(const BitMatrix& o) const;
  BitVec apply(const BitVec& v) const;
  bool operator==(const BitMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && row_ == o.row_; }
  bool is_zero() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<BitVec> row_;
};

struct Gf2RankKernel {
  int rank = 0;
  std::vector<BitVec> kernel;  // basis of {x : M x = 0}
};
Gf2RankKernel gf2_rank_kernel(const BitMatrix& m);
int gf2_rank(const BitMatrix& m);

// Echelon basis of a span, leftmost-pivot reduced; deterministic.
class Span {
 public:
  explicit Span(int n) : n_(n) {}
  int dim() const { return static_cast<int>(basis_.size()); }
  int ambient() const { return n_; }
  // Adds v; returns true if independent of the current span.
  bool add(const BitVec& v);
  bool contains(const BitVec& v) const;
  BitVec reduce(const BitVec& v) const;
  const std::vector<BitVec>& basis() const { return basis_; }

 private:
  int n_;
  std::vector<BitVec> basis_;
  std::vector<int> pivot_;
};

int span_dim(const std::vector<BitVec>& vs, int n);

// Coordinates of W/U: lifts chosen by leftmost-pivot elimination.
class Quotient {
 public:
  Quotient(const std::vector<BitVec>& w, const std::vector<BitVec>& u, int n);
  int dim() const { return static_cast<int>(lifts_.size()); }
  const std::vector<BitVec>& lifts() const { return lifts_; }
  // Coordinates of v (which must lie in W) modulo U.
  BitVec coords(const BitVec& v) const;

 private:
  int n_;
  std::vector<BitVec> lifts_;
  std::vector<BitVec> ech_;
  std::vector<int> pivot_;
  std::vector<int> lift_index_;  // -1 for rows coming from U
};

// Solve A x = b. Returns a particular solution (free variables zero).
std::optional<BitVec> gf2_solve(const BitMatrix& a, const BitVec& b);

// Inverse of a square matrix, or nullopt if singular.
std::optional<BitMatrix> gf2_inverse(const BitMatrix& a);

// Random element of the affine solution space, or nullopt if inconsistent.
std::optional<BitVec> gf2_solve_random(const BitMatrix& a, const BitVec& b, std::mt19937_64& rng);

}  // namespace equihf
