// Exact scalars: GF(2), GF(2)[h], GF(2)(h), dense matrices over them and
// Smith normal forms over the polynomial ring and its localization at (h).
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace equihf {

struct Bit {
  std::uint8_t value = 0;
  Bit() = default;
  Bit(bool b) : value(b ? 1 : 0) {}
  Bit operator+(Bit o) const { return Bit((value ^ o.value) != 0); }
  Bit operator*(Bit o) const { return Bit((value & o.value) != 0); }
  bool operator==(const Bit&) const = default;
  explicit operator bool() const { return value != 0; }
};

inline constexpr int kInfValuation = std::numeric_limits<int>::max();

// Polynomial in h over GF(2). Bit k of the packed words is the coefficient of h^k.
class HPoly {
 public:
  HPoly() = default;
  static HPoly zero() { return HPoly(); }
  static HPoly one() { return monomial(0); }
  static HPoly monomial(int k);
  static HPoly from_exponents(const std::vector<int>& exps);
  static HPoly parse(const std::string& s);

  bool is_zero() const { return w_.empty(); }
  bool is_one() const { return w_.size() == 1 && w_[0] == 1; }
  int degree() const;
  int valuation() const;
  bool coeff(int k) const;
  void set_coeff(int k, bool b);
  bool constant_term() const { return coeff(0); }
  // A unit of the local ring GF(2)[h]_(h).
  bool is_local_unit() const { return constant_term(); }
  std::vector<int> exponents() const;

  HPoly operator+(const HPoly& o) const;
  HPoly& operator+=(const HPoly& o);
  HPoly operator-(const HPoly& o) const { return *this + o; }
  HPoly operator*(const HPoly& o) const;
  HPoly& operator*=(const HPoly& o) { return *this = *this * o; }
  bool operator==(const HPoly& o) const { return w_ == o.w_; }
  bool operator<(const HPoly& o) const;

  HPoly shift_up(int k) const;    // multiply by h^k
  HPoly shift_down(int k) const;  // exact division by h^k (low bits dropped)
  HPoly truncate(int n) const;    // reduce mod h^n
  std::pair<HPoly, HPoly> divmod(const HPoly& b) const;
  std::optional<std::pair<HPoly, HPoly>> try_divmod(const HPoly& b) const;
  HPoly operator/(const HPoly& b) const { return divmod(b).first; }
  HPoly operator%(const HPoly& b) const { return divmod(b).second; }
  bool divides(const HPoly& b) const;  // *this | b
  // h^v * u with u a local unit; returns u.
  HPoly unit_part() const { return shift_down(valuation()); }

  std::string str() const;
  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  void normalize();
  std::vector<std::uint64_t> w_;
};

HPoly gcd(HPoly a, HPoly b);
HPoly lcm(const HPoly& a, const HPoly& b);

// Element of GF(2)(h) in lowest terms.
class HRational {
 public:
  HRational() : num_(), den_(HPoly::one()) {}
  HRational(const HPoly& p) : num_(p), den_(HPoly::one()) {}
  HRational(const HPoly& n, const HPoly& d);
  static HRational parse(const std::string& s);

  const HPoly& num() const { return num_; }
  const HPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  HRational inverse() const;
  HRational operator+(const HRational& o) const;
  HRational operator-(const HRational& o) const { return *this + o; }
  HRational operator*(const HRational& o) const;
  HRational operator/(const HRational& o) const { return *this * o.inverse(); }
  bool operator==(const HRational& o) const { return num_ == o.num_ && den_ == o.den_; }
  std::string str() const;

 private:
  HPoly num_, den_;
};

template <class T>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<T> a;
  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(HPoly::one());
    return m;
  }
  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  Mat transpose() const {
    Mat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  bool is_zero() const {
    for (const auto& x : a)
      if (!x.is_zero()) return false;
    return true;
  }
};

template <class T>
Mat<T> operator*(const Mat<T>& x, const Mat<T>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product: dimension mismatch");
  Mat<T> z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const T& v = x(i, k);
      if (v.is_zero()) continue;
      for (int j = 0; j < y.cols; ++j)
        if (!y(k, j).is_zero()) z(i, j) = z(i, j) + v * y(k, j);
    }
  return z;
}

template <class T>
Mat<T> operator+(const Mat<T>& x, const Mat<T>& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix sum: dimension mismatch");
  Mat<T> z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = z.a[i] + y.a[i];
  return z;
}

using PolyMatrix = Mat<HPoly>;
using FracMatrix = Mat<HRational>;
using PolyVec = std::vector<HPoly>;
using FracVec = std::vector<HRational>;

FracMatrix to_frac(const PolyMatrix& m);
PolyVec apply(const PolyMatrix& m, const PolyVec& v);
PolyMatrix poly_matrix_from_strings(const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> poly_matrix_to_strings(const PolyMatrix& m);
PolyMatrix truncate(const PolyMatrix& m, int n);
PolyMatrix reduce_mod_h(const PolyMatrix& m);

// Rank and kernel over GF(2)(h).
struct FracRankKernel {
  int rank = 0;
  std::vector<FracVec> kernel;
};
FracRankKernel frac_rank_kernel(const FracMatrix& m);
FracRankKernel frac_rank_kernel(const PolyMatrix& m);
int frac_rank(const PolyMatrix& m);

// Row/column operation log for Smith forms.
struct SmithOp {
  enum Kind { SwapRows, SwapCols, AddRow, AddCol, ScaleRow, ScaleCol } kind;
  int i = 0, j = 0;
  // AddRow: row_i = u*row_i + q*row_j (u a unit; u = 1 over the PID).
  // ScaleRow: row_i = row_i / u (u a local unit). Columns alike.
  HPoly q, u;
};

struct SmithResult {
  int rank = 0;
  std::vector<HPoly> invariant_factors;  // PID form
  std::vector<int> exponents;            // local form, ascending
  PolyMatrix diagonal;                   // the reduced matrix
  std::vector<SmithOp> ops;
};

SmithResult smith_pid(const PolyMatrix& m);
SmithResult smith_local(const PolyMatrix& m);
PolyMatrix replay_smith(const PolyMatrix& m, const std::vector<SmithOp>& ops);

// Row and column transforms U, V with U*M*V = diagonal (PID form only).
struct SmithTransforms {
  PolyMatrix U, V;
};
SmithTransforms smith_transforms(const PolyMatrix& m, const std::vector<SmithOp>& ops);

// Is v in the GF(2)[h]-column span of M?
bool in_image_pid(const PolyMatrix& m, const PolyVec& v);

// Dimension over GF(2) of coker(M mod h^n), computed directly over GF(2).
int truncated_coker_dim(const PolyMatrix& m, int n);

}  // namespace equihf
