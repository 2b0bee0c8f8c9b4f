#include "equihf/symplinalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"

namespace equihf {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::string real_str(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void require_square_even(const RMat& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0)
    throw InputError(std::string(what) + ": expected a nonempty 2n x 2n matrix, got " + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()));
}

Eigen::VectorXcd eigenvalues(const RMat& a) {
  Eigen::EigenSolver<RMat> es(a, false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation did not converge");
  return es.eigenvalues();
}

RMat rotation(int plane, double angle, int n) {
  RMat r = RMat::Identity(2 * n, 2 * n);
  const int i = 2 * (plane - 1);
  r(i, i) = std::cos(angle);
  r(i, i + 1) = -std::sin(angle);
  r(i + 1, i) = std::sin(angle);
  r(i + 1, i + 1) = std::cos(angle);
  return r;
}

}  // namespace

RMat standard_j(int n) {
  RMat j = RMat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = 1;
    j(2 * k + 1, 2 * k) = -1;
  }
  return j;
}

double symplectic_residual(const RMat& a) {
  const RMat j = standard_j(static_cast<int>(a.rows() / 2));
  return (a.transpose() * j * a - j).cwiseAbs().maxCoeff();
}

Membership membership(const RMat& a, const Tolerances& tol) {
  require_square_even(a, "membership");
  Membership m;
  m.residual = symplectic_residual(a);
  if (m.residual > tol.sp)
    throw InputError("matrix is not symplectic: residual " + real_str(m.residual) + " exceeds " + real_str(tol.sp));
  m.sp = true;
  double d1 = INFINITY, dm1 = INFINITY;
  for (const cd& l : eigenvalues(a)) {
    d1 = std::min(d1, std::abs(l - 1.0));
    dm1 = std::min(dm1, std::abs(l + 1.0));
  }
  m.star = d1 > tol.eig;
  m.starstar = m.star && dm1 > tol.eig;
  return m;
}

RMat hamiltonian_from_form(const RMat& s) { return -standard_j(static_cast<int>(s.rows() / 2)) * s; }

RMat form_from_hamiltonian(const RMat& b) { return standard_j(static_cast<int>(b.rows() / 2)) * b; }

bool is_hamiltonian(const RMat& b, double tol) {
  if (b.rows() != b.cols() || b.rows() % 2) return false;
  RMat s = form_from_hamiltonian(b);
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol;
}

int morse_index(const RMat& s) {
  if (s.rows() != s.cols()) throw InputError("quadratic form: matrix is not square");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw InputError("quadratic form: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(s);
  int neg = 0;
  for (double e : es.eigenvalues()) {
    if (std::abs(e) <= 1e-9) throw InputError("quadratic form is degenerate");
    if (e < 0) ++neg;
  }
  return neg;
}

RMat parse_quadratic_form(const std::string& text, int n) {
  struct Term {
    double c;
    int u, v;
  };
  std::vector<Term> terms;
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& why) {
    throw InputError("quadratic form '" + text + "' at offset " + std::to_string(i) + ": " + why);
  };
  int max_index = 0;
  skip();
  if (i == text.size()) fail("empty");
  while (true) {
    skip();
    double c = 1;
    while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') c = -c;
      ++i;
      skip();
    }
    std::vector<int> vars;
    bool any = false;
    while (i < text.size()) {
      skip();
      if (i == text.size()) break;
      const char ch = text[i];
      if (ch == '*') {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        double x = 0;
        auto r = std::from_chars(text.data() + i, text.data() + text.size(), x);
        if (r.ec != std::errc()) fail("bad number");
        c *= x;
        i = r.ptr - text.data();
        any = true;
      } else if (ch == 'p' || ch == 'q') {
        ++i;
        int k = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) k = 10 * k + (text[i++] - '0');
        if (k == 0) k = 1;
        max_index = std::max(max_index, k);
        int var = 2 * (k - 1) + (ch == 'q');
        int power = 1;
        if (i < text.size() && text[i] == '^') {
          ++i;
          if (i == text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) fail("bad exponent");
          power = text[i++] - '0';
        }
        for (int t = 0; t < power; ++t) vars.push_back(var);
        any = true;
      } else if (ch == '+' || ch == '-') {
        break;
      } else {
        fail(std::string("unexpected character '") + ch + "'");
      }
    }
    if (!any) fail("empty term");
    if (vars.size() != 2) fail("term is not quadratic");
    terms.push_back({c, vars[0], vars[1]});
    if (i == text.size()) break;
  }
  const int dim = 2 * std::max(n, max_index);
  RMat s = RMat::Zero(dim, dim);
  for (const auto& t : terms) {
    if (t.u == t.v) {
      s(t.u, t.u) += t.c;
    } else {
      s(t.u, t.v) += t.c / 2;
      s(t.v, t.u) += t.c / 2;
    }
  }
  return s;
}

RMat cayley(const RMat& b, const Tolerances& tol) {
  require_square_even(b, "cayley");
  if (!is_hamiltonian(b, tol.sp)) throw InputError("cayley: matrix is not Hamiltonian");
  for (const cd& l : eigenvalues(b))
    if (std::abs(l) <= tol.eig || std::abs(l - 1.0) <= tol.eig || std::abs(l + 1.0) <= tol.eig)
      throw InputError("cayley: B has an eigenvalue within tolerance of 0, 1 or -1");
  const RMat id = RMat::Identity(b.rows(), b.cols());
  Eigen::PartialPivLU<RMat> lu(b - id);
  if (lu.rcond() < 1e-12) throw NumericError("cayley: B - I is ill-conditioned");
  return (b + id) * lu.inverse();
}

RMat cayley_inv(const RMat& a, const Tolerances& tol) {
  if (!membership(a, tol).starstar) throw InputError("cayley_inv: A has eigenvalue 1 or -1");
  const RMat id = RMat::Identity(a.rows(), a.cols());
  Eigen::PartialPivLU<RMat> lu(a - id);
  if (lu.rcond() < 1e-12) throw NumericError("cayley_inv: A - I is ill-conditioned");
  return lu.solve(a + id);
}

KreinResult krein_index(const RMat& a, const Tolerances& tol) {
  if (!membership(a, tol).starstar) throw InputError("krein_index: matrix has eigenvalue 1 or -1");
  const int dim = static_cast<int>(a.rows()), n = dim / 2;
  const Eigen::VectorXcd ev = eigenvalues(a);
  const double ctol = 10 * tol.eig;

  std::vector<int> cl(dim, -1);
  int ncl = 0;
  for (int s = 0; s < dim; ++s) {
    if (cl[s] >= 0) continue;
    std::vector<int> stack{s};
    cl[s] = ncl;
    while (!stack.empty()) {
      int k = stack.back();
      stack.pop_back();
      for (int j = 0; j < dim; ++j)
        if (cl[j] < 0 && std::abs(ev[j] - ev[k]) <= ctol) {
          cl[j] = ncl;
          stack.push_back(j);
        }
    }
    ++ncl;
  }

  const CMat ac = a.cast<cd>();
  const CMat jc = standard_j(n).cast<cd>();
  KreinResult out;
  for (int c = 0; c < ncl; ++c) {
    cd lambda = 0;
    int m = 0;
    for (int j = 0; j < dim; ++j)
      if (cl[j] == c) {
        lambda += ev[j];
        ++m;
      }
    lambda /= static_cast<double>(m);
    const double off = std::abs(std::abs(lambda) - 1.0);
    if (off > ctol && off <= 100 * ctol)
      throw NumericError("krein_index: eigenvalue " + real_str(lambda.real()) + "+" + real_str(lambda.imag()) +
                         "i is ambiguously close to the unit circle");
    if (off > ctol || lambda.imag() <= 0) continue;
    CMat shifted = ac - lambda * CMat::Identity(dim, dim);
    CMat p = shifted;
    for (int k = 1; k < m; ++k) p = p * shifted;
    Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullV);
    const CMat v = svd.matrixV().rightCols(m);
    CMat g = cd(0, 1) * v.adjoint() * jc * v;
    g = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> he(g);
    int sig = 0;
    for (double e : he.eigenvalues()) {
      if (std::abs(e) <= 1e-9) throw NumericError("krein_index: degenerate hermitian form on E");
      sig += e > 0 ? 1 : -1;
    }
    out.clusters.push_back({lambda, m, sig});
    out.kappa += sig;
    out.e_dim += m;
  }
  const int s2 = sign_det_i_minus(a * a);
  const int lhs = (out.kappa % 2 == 0) ? 1 : -1;
  const int rhs = ((n % 2 == 0) ? 1 : -1) * s2;
  if (lhs != rhs) throw NumericError("krein_index: parity check (-1)^kappa = (-1)^n sign det(I-A^2) failed");
  return out;
}

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::IPlus: return "i+";
    case BlockKind::IMinus: return "i-";
    case BlockKind::IIPlus: return "ii+";
    case BlockKind::IIMinus: return "ii-";
    case BlockKind::III: return "iii";
  }
  return "?";
}

std::string block_str(const BlockSpec& b) {
  if (b.kind == BlockKind::IPlus || b.kind == BlockKind::IMinus) return block_kind_name(b.kind) + ":a=" + real_str(b.a);
  return block_kind_name(b.kind) + ":a1=" + real_str(b.a1) + ",a2=" + real_str(b.a2);
}

BlockSpec parse_block(const std::string& raw) {
  std::string text;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) text.push_back(ch);
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  BlockSpec b;
  if (kind == "i+") b.kind = BlockKind::IPlus;
  else if (kind == "i-") b.kind = BlockKind::IMinus;
  else if (kind == "ii+") b.kind = BlockKind::IIPlus;
  else if (kind == "ii-") b.kind = BlockKind::IIMinus;
  else if (kind == "iii") b.kind = BlockKind::III;
  else throw InputError("unknown block kind '" + kind + "'");
  bool has_a = false, has_a1 = false, has_a2 = false, has_theta = false;
  double theta = 0;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InputError("block parameter '" + kv + "' is not key=value");
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      double x = 0;
      auto r = std::from_chars(val.data(), val.data() + val.size(), x);
      if (r.ec != std::errc() || r.ptr != val.data() + val.size())
        throw InputError("block parameter '" + kv + "' has a bad value");
      if (key == "a") b.a = x, has_a = true;
      else if (key == "a1") b.a1 = x, has_a1 = true;
      else if (key == "a2") b.a2 = x, has_a2 = true;
      else if (key == "theta") theta = x, has_theta = true;
      else throw InputError("unknown block parameter '" + key + "'");
    }
  }
  const bool type_i = b.kind == BlockKind::IPlus || b.kind == BlockKind::IMinus;
  if (type_i && !has_a) throw InputError("block " + kind + " needs parameter a");
  if (!type_i) {
    if (has_theta && b.kind != BlockKind::III) {
      b.a1 = std::cos(theta);
      b.a2 = std::sin(theta);
    } else if (!has_a1 || !has_a2) {
      throw InputError("block " + kind + " needs parameters a1 and a2");
    }
  }
  validate_block(b);
  return b;
}

std::vector<BlockSpec> parse_blocks(const std::string& text) {
  std::vector<BlockSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_block(item));
  if (out.empty()) throw InputError("empty block list");
  return out;
}

void validate_block(const BlockSpec& b) {
  auto bad = [&](const std::string& why) { throw InputError("block " + block_str(b) + ": " + why); };
  const double r2 = b.a1 * b.a1 + b.a2 * b.a2;
  switch (b.kind) {
    case BlockKind::IPlus:
      if (!(b.a > 0 && b.a < 1)) bad("requires a in (0,1)");
      break;
    case BlockKind::IMinus:
      if (!(b.a > -1 && b.a < 0)) bad("requires a in (-1,0)");
      break;
    case BlockKind::IIPlus:
    case BlockKind::IIMinus:
      if (std::abs(r2 - 1) > 1e-9) bad("requires a1^2 + a2^2 = 1");
      if (b.kind == BlockKind::IIPlus ? !(b.a2 > 0) : !(b.a2 < 0)) bad("wrong sign of a2");
      break;
    case BlockKind::III:
      if (!(b.a1 > -1 && b.a1 < 1)) bad("requires a1 in (-1,1)");
      if (!(r2 > 0 && r2 <= 1 + 1e-12)) bad("requires a1^2 + a2^2 in (0,1]");
      break;
  }
}

int block_half_dim(const BlockSpec& b) { return b.kind == BlockKind::III ? 2 : 1; }

RMat build_block(const BlockSpec& b) {
  validate_block(b);
  switch (b.kind) {
    case BlockKind::IPlus:
    case BlockKind::IMinus: {
      RMat m = RMat::Zero(2, 2);
      m(0, 0) = b.a;
      m(1, 1) = 1 / b.a;
      return m;
    }
    case BlockKind::IIPlus:
    case BlockKind::IIMinus: {
      RMat m(2, 2);
      m << b.a1, -b.a2, b.a2, b.a1;
      return m;
    }
    case BlockKind::III: {
      const double r2 = b.a1 * b.a1 + b.a2 * b.a2;
      RMat m = RMat::Zero(4, 4);
      m(0, 0) = b.a1;
      m(0, 2) = -b.a2;
      m(1, 1) = b.a1 / r2;
      m(1, 3) = -b.a2 / r2;
      m(2, 0) = b.a2;
      m(2, 2) = b.a1;
      m(3, 1) = b.a2 / r2;
      m(3, 3) = b.a1 / r2;
      return m;
    }
  }
  return {};
}

RMat direct_sum(const std::vector<RMat>& ms) {
  int dim = 0;
  for (const auto& m : ms) dim += static_cast<int>(m.rows());
  RMat out = RMat::Zero(dim, dim);
  int off = 0;
  for (const auto& m : ms) {
    out.block(off, off, m.rows(), m.cols()) = m;
    off += static_cast<int>(m.rows());
  }
  return out;
}

RMat build_blocks(const std::vector<BlockSpec>& bs) {
  std::vector<RMat> ms;
  for (const auto& b : bs) ms.push_back(build_block(b));
  return direct_sum(ms);
}

int sign_det_i_minus(const RMat& a) {
  // complex eigenvalues pair up with positive |1 - l|^2, so only real ones count
  int sign = 1;
  for (const cd& l : eigenvalues(a)) {
    if (std::abs(1.0 - l) <= 1e-14) return 0;
    if (std::abs(l.imag()) <= 1e-12 * std::max(1.0, std::abs(l)) && l.real() > 1) sign = -sign;
  }
  return sign;
}

ComponentInvariant component_invariant(const RMat& a, const Tolerances& tol) {
  if (!membership(a, tol).starstar) throw InputError("component_invariant: matrix has eigenvalue 1 or -1");
  return {sign_det_i_minus(a), krein_index(a, tol).kappa};
}

bool admissible_component(int s, int k, int n) {
  if (n < 1 || (s != 1 && s != -1)) return false;
  return std::abs(k) <= (s == 1 ? n : n - 1);
}

std::vector<BlockSpec> representative_blocks(int s, int k, int n) {
  if (!admissible_component(s, k, n))
    throw InputError("component (" + std::to_string(s) + "," + std::to_string(k) + ") is not admissible for n = " +
                     std::to_string(n));
  std::vector<BlockSpec> out;
  for (int j = 0; j < std::abs(k); ++j) {
    BlockSpec b;
    b.kind = k > 0 ? BlockKind::IIPlus : BlockKind::IIMinus;
    b.a1 = 0;
    b.a2 = k > 0 ? 1 : -1;
    out.push_back(b);
  }
  if (s == -1) out.push_back({BlockKind::IPlus, 0.5, 0, 0});
  while (static_cast<int>(out.size()) < n) out.push_back({BlockKind::IMinus, -0.5, 0, 0});
  return out;
}

RMat representative_for(int s, int k, int n) { return build_blocks(representative_blocks(s, k, n)); }

// ---------------------------------------------------------------- paths

int PathExpr::half_dim() const {
  switch (kind) {
    case Kind::Exp: return static_cast<int>(form.rows() / 2);
    case Kind::Rot: return n;
    case Kind::Cat: return args[1].half_dim();
    case Kind::Sum: return args[0].half_dim() + args[1].half_dim();
    case Kind::Loop: return args[0].half_dim();
  }
  return 0;
}

PathExpr PathExpr::exp(RMat s, double t) {
  if (s.rows() != s.cols() || s.rows() % 2 || s.rows() == 0) throw InputError("exp: form must be 2n x 2n");
  PathExpr p;
  p.kind = Kind::Exp;
  p.form = std::move(s);
  p.t = t;
  return p;
}

PathExpr PathExpr::rot(int plane, double angle, int n) {
  if (n < 1 || plane < 1 || plane > n) throw InputError("rot: plane index out of range");
  PathExpr p;
  p.kind = Kind::Rot;
  p.plane = plane;
  p.angle = angle;
  p.n = n;
  return p;
}

PathExpr PathExpr::cat(PathExpr a, PathExpr b) {
  if (a.half_dim() != b.half_dim()) throw InputError("cat: dimension mismatch");
  PathExpr p;
  p.kind = Kind::Cat;
  p.args = {std::move(a), std::move(b)};
  return p;
}

PathExpr PathExpr::sum(PathExpr a, PathExpr b) {
  PathExpr p;
  p.kind = Kind::Sum;
  p.args = {std::move(a), std::move(b)};
  return p;
}

PathExpr PathExpr::loop(int m, PathExpr x) {
  PathExpr p;
  p.kind = Kind::Loop;
  p.count = m;
  p.args = {std::move(x)};
  return p;
}

RMat evaluate(const PathExpr& p) {
  switch (p.kind) {
    case PathExpr::Kind::Exp: {
      RMat b = p.t * hamiltonian_from_form(p.form);
      return b.exp();
    }
    case PathExpr::Kind::Rot: return rotation(p.plane, p.angle, p.n);
    case PathExpr::Kind::Cat: return evaluate(p.args[0]) * evaluate(p.args[1]);
    case PathExpr::Kind::Sum: return direct_sum({evaluate(p.args[0]), evaluate(p.args[1])});
    case PathExpr::Kind::Loop: return evaluate(p.args[0]);
  }
  return {};
}

namespace {

struct PathParser {
  const std::string& s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("path expression at offset " + std::to_string(i) + ": " + why);
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  void expect(char c) {
    skip();
    if (i >= s.size() || s[i] != c) fail(std::string("expected '") + c + "'");
    ++i;
  }
  bool peek(char c) {
    skip();
    return i < s.size() && s[i] == c;
  }
  std::string ident() {
    skip();
    size_t b = i;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) fail("expected a name");
    return s.substr(b, i - b);
  }
  // raw text up to the next ',' or ')' at nesting depth 0
  std::string raw_arg() {
    skip();
    size_t b = i;
    int depth = 0;
    while (i < s.size()) {
      char c = s[i];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++i;
    }
    std::string r = s.substr(b, i - b);
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
    if (r.empty()) fail("empty argument");
    return r;
  }
  // sums of terms like 0.5, -pi/2, 2*pi
  static double real(const std::string& t) {
    std::string x;
    for (char c : t)
      if (!std::isspace(static_cast<unsigned char>(c))) x.push_back(c);
    for (size_t k = x.size(); k-- > 1;)
      if ((x[k] == '+' || x[k] == '-') && x[k - 1] != 'e' && x[k - 1] != 'E' && x[k - 1] != '*' && x[k - 1] != '/')
        return real(x.substr(0, k)) + real(x.substr(k));
    if (!x.empty() && x[0] == '+') x.erase(0, 1);
    const auto pi = x.find("pi");
    if (pi == std::string::npos) {
      double v = 0;
      auto r = std::from_chars(x.data(), x.data() + x.size(), v);
      if (r.ec != std::errc() || r.ptr != x.data() + x.size()) throw InputError("bad number '" + t + "'");
      return v;
    }
    double coef = 1, den = 1;
    std::string pre = x.substr(0, pi), post = x.substr(pi + 2);
    if (!pre.empty() && pre.back() == '*') pre.pop_back();
    if (pre == "-") coef = -1;
    else if (!pre.empty()) coef = real(pre);
    if (!post.empty()) {
      if (post[0] != '/') throw InputError("bad number '" + t + "'");
      den = real(post.substr(1));
    }
    return coef * kPi / den;
  }
  int integer(const std::string& t) {
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("bad integer '" + t + "'");
    return v;
  }
  static RMat form(const std::string& t, int n) {
    if (!t.empty() && t[0] == '[') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(t);
      } catch (const std::exception& e) {
        throw InputError(std::string("bad matrix literal: ") + e.what());
      }
      const int rows = static_cast<int>(j.size());
      RMat m(rows, rows);
      for (int r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != rows) throw InputError("matrix literal is not square");
        for (int c = 0; c < rows; ++c) m(r, c) = j[r][c].get<double>();
      }
      return m;
    }
    std::string u = t;
    if (u.size() >= 2 && u.front() == '"' && u.back() == '"') u = u.substr(1, u.size() - 2);
    return parse_quadratic_form(u, n);
  }

  PathExpr expr() {
    const std::string name = ident();
    expect('(');
    PathExpr out;
    if (name == "exp") {
      std::string f = raw_arg();
      expect(',');
      double t = real(raw_arg());
      int n = 0;
      if (peek(',')) {
        ++i;
        n = integer(raw_arg());
      }
      out = PathExpr::exp(form(f, n), t);
    } else if (name == "rot") {
      int k = integer(raw_arg());
      expect(',');
      double a = real(raw_arg());
      int n = 1;
      if (peek(',')) {
        ++i;
        n = integer(raw_arg());
      }
      out = PathExpr::rot(k, a, n);
    } else if (name == "cat" || name == "sum") {
      std::vector<PathExpr> xs{expr()};
      while (peek(',')) {
        ++i;
        xs.push_back(expr());
      }
      if (xs.size() < 2) fail(name + " needs at least two arguments");
      out = xs[0];
      for (size_t k = 1; k < xs.size(); ++k)
        out = name == "cat" ? PathExpr::cat(out, xs[k]) : PathExpr::sum(out, xs[k]);
    } else if (name == "loop") {
      int m = integer(raw_arg());
      expect(',');
      out = PathExpr::loop(m, expr());
    } else {
      fail("unknown node '" + name + "'");
    }
    expect(')');
    return out;
  }
};

}  // namespace

PathExpr parse_path(const std::string& text) {
  PathParser p{text};
  PathExpr e = p.expr();
  p.skip();
  if (p.i != text.size()) p.fail("trailing characters");
  return e;
}

std::string path_str(const PathExpr& p) {
  switch (p.kind) {
    case PathExpr::Kind::Exp: {
      std::string m = "[";
      for (int r = 0; r < p.form.rows(); ++r) {
        m += r ? ",[" : "[";
        for (int c = 0; c < p.form.cols(); ++c) m += (c ? "," : "") + real_str(p.form(r, c));
        m += "]";
      }
      return "exp(" + m + "], " + real_str(p.t) + ")";
    }
    case PathExpr::Kind::Rot:
      return "rot(" + std::to_string(p.plane) + ", " + real_str(p.angle) + ", " + std::to_string(p.n) + ")";
    case PathExpr::Kind::Cat: return "cat(" + path_str(p.args[0]) + ", " + path_str(p.args[1]) + ")";
    case PathExpr::Kind::Sum: return "sum(" + path_str(p.args[0]) + ", " + path_str(p.args[1]) + ")";
    case PathExpr::Kind::Loop: return "loop(" + std::to_string(p.count) + ", " + path_str(p.args[0]) + ")";
  }
  return {};
}

namespace {

// c with Q = c p_k q_k + (form in the other variables), or nullopt.
std::optional<double> decoupled_pq(const RMat& s, int plane) {
  const int i = 2 * (plane - 1), dim = static_cast<int>(s.rows());
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  for (int r : {i, i + 1})
    for (int c = 0; c < dim; ++c)
      if (c != i && c != i + 1 && (std::abs(s(r, c)) > eps || std::abs(s(c, r)) > eps)) return std::nullopt;
  if (std::abs(s(i, i)) > eps || std::abs(s(i + 1, i + 1)) > eps) return std::nullopt;
  if (std::abs(s(i, i + 1)) <= eps) return std::nullopt;
  return s(i, i + 1);
}

void check_exp_arc(const PathExpr& p, const Tolerances& tol) {
  if (p.t == 0) throw InputError("exp: zero time");
  const RMat b = p.t * hamiltonian_from_form(p.form);
  for (const cd& l : eigenvalues(b)) {
    if (std::abs(l.real()) > tol.eig) continue;
    if (std::abs(l.imag()) >= 2 * kPi - tol.eig)
      throw NumericError("exp arc " + path_str(p) + " meets eigenvalue 1 (generator eigenvalue " + real_str(l.real()) +
                         "+" + real_str(l.imag()) + "i)");
  }
}

}  // namespace

PathExpr square(const PathExpr& p) {
  switch (p.kind) {
    case PathExpr::Kind::Exp: return PathExpr::exp(p.form, 2 * p.t);
    case PathExpr::Kind::Rot:
      if (p.n != 1) throw InputError("square: standalone rot requires n = 1");
      return PathExpr::rot(1, 2 * p.angle, 1);
    case PathExpr::Kind::Cat: {
      const PathExpr& r = p.args[0];
      const PathExpr& e = p.args[1];
      if (r.kind != PathExpr::Kind::Rot || e.kind != PathExpr::Kind::Exp || std::abs(r.angle - kPi) > 1e-12 ||
          !decoupled_pq(e.form, r.plane))
        throw InputError("square: only cat(rot(k, pi), exp(Q)) with Q decoupled in plane k is supported");
      return PathExpr::loop(1, PathExpr::exp(e.form, 2 * e.t));
    }
    case PathExpr::Kind::Sum: return PathExpr::sum(square(p.args[0]), square(p.args[1]));
    case PathExpr::Kind::Loop: return PathExpr::loop(2 * p.count, square(p.args[0]));
  }
  return p;
}

int conley_zehnder(const PathExpr& p, const Tolerances& tol) {
  const RMat a = evaluate(p);
  if (!membership(a, tol).star) throw InputError("conley_zehnder: endpoint " + path_str(p) + " has eigenvalue 1");
  int mu = 0;
  switch (p.kind) {
    case PathExpr::Kind::Exp:
      check_exp_arc(p, tol);
      mu = morse_index(p.t > 0 ? p.form : RMat(-p.form));
      break;
    case PathExpr::Kind::Rot:
      if (p.n != 1) throw InputError("conley_zehnder: standalone rot requires n = 1");
      mu = -2 * static_cast<int>(std::floor(p.angle / (2 * kPi)));
      break;
    case PathExpr::Kind::Cat: {
      const PathExpr& r = p.args[0];
      const PathExpr& e = p.args[1];
      if (r.kind != PathExpr::Kind::Rot || e.kind != PathExpr::Kind::Exp)
        throw InputError("conley_zehnder: cat must be cat(rot, exp)");
      if (!decoupled_pq(e.form, r.plane))
        throw InputError("conley_zehnder: cat(rot(k,.), exp(Q)) needs Q = c p_k q_k + (other variables)");
      check_exp_arc(e, tol);
      mu = morse_index(e.t > 0 ? e.form : RMat(-e.form)) - 1;
      // continue from the angle pi to the requested angle inside Sp*
      if (std::abs(r.angle - kPi) > 1e-12) {
        const RMat y = evaluate(e);
        const int samples = std::max(64, static_cast<int>(std::ceil(std::abs(r.angle - kPi) * 64)));
        int sign = 0;
        for (int j = 0; j <= samples; ++j) {
          const double phi = kPi + (r.angle - kPi) * j / samples;
          const RMat m = rotation(r.plane, phi, r.n) * y;
          const double d = (RMat::Identity(m.rows(), m.cols()) - m).determinant();
          const int sj = d > 0 ? 1 : -1;
          if (std::abs(d) <= tol.eig || (sign != 0 && sj != sign))
            throw NumericError("conley_zehnder: rotation arc leaves Sp* near angle " + real_str(phi));
          sign = sj;
        }
      }
      break;
    }
    case PathExpr::Kind::Sum: mu = conley_zehnder(p.args[0], tol) + conley_zehnder(p.args[1], tol); break;
    case PathExpr::Kind::Loop: mu = conley_zehnder(p.args[0], tol) - 2 * p.count; break;
  }
  const int parity = (mu % 2 == 0) ? 1 : -1;
  if (parity != sign_det_i_minus(a))
    throw NumericError("conley_zehnder: parity check (-1)^mu = sign det(I-A) failed for " + path_str(p));
  return mu;
}

PathExpr block_lift(const BlockSpec& b) {
  validate_block(b);
  switch (b.kind) {
    case BlockKind::IPlus:
    case BlockKind::IMinus: {
      const double c = -std::log(std::abs(b.a));
      RMat s(2, 2);
      s << 0, c, c, 0;
      PathExpr e = PathExpr::exp(s, 1);
      return b.kind == BlockKind::IPlus ? e : PathExpr::cat(PathExpr::rot(1, kPi, 1), e);
    }
    case BlockKind::IIPlus:
    case BlockKind::IIMinus: {
      const double theta = std::atan2(b.a2, b.a1);
      return PathExpr::exp(theta * RMat::Identity(2, 2), 1);
    }
    case BlockKind::III: {
      const double alpha = 0.5 * std::log(b.a1 * b.a1 + b.a2 * b.a2);
      const double theta = std::atan2(b.a2, b.a1);
      Eigen::Matrix2d x;
      x << alpha, -theta, theta, alpha;
      const Eigen::Matrix2d y = -x.transpose();
      RMat bm = RMat::Zero(4, 4);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          bm(2 * r, 2 * c) = x(r, c);
          bm(2 * r + 1, 2 * c + 1) = y(r, c);
        }
      RMat s = form_from_hamiltonian(bm);
      s = (s + s.transpose()) / 2;
      return PathExpr::exp(s, 1);
    }
  }
  return {};
}

PathExpr blocks_lift(const std::vector<BlockSpec>& bs) {
  if (bs.empty()) throw InputError("empty block list");
  PathExpr out = block_lift(bs[0]);
  for (size_t k = 1; k < bs.size(); ++k) out = PathExpr::sum(out, block_lift(bs[k]));
  return out;
}

CzKreinReport verify_cz_krein(const RMat& a, const PathExpr& lift, const Tolerances& tol) {
  CzKreinReport r;
  r.n = static_cast<int>(a.rows() / 2);
  const RMat end = evaluate(lift);
  if (end.rows() != a.rows()) throw InputError("verify_cz_krein: lift has the wrong dimension");
  r.lift_residual = (end - a).cwiseAbs().maxCoeff();
  if (r.lift_residual > 1e-8 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw InputError("verify_cz_krein: lift does not project to the matrix (residual " + real_str(r.lift_residual) +
                     ")");
  r.kappa = krein_index(a, tol).kappa;
  r.mu = conley_zehnder(lift, tol);
  r.mu_square = conley_zehnder(square(lift), tol);
  return r;
}

CzKreinReport verify_cz_krein(const std::vector<BlockSpec>& bs, const Tolerances& tol) {
  return verify_cz_krein(build_blocks(bs), blocks_lift(bs), tol);
}

std::vector<BlockSpec> random_blocks(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_real_distribution<double> a(0.1, 0.9), theta(0.1, kPi - 0.1), r(0.2, 0.8), phase(0, kPi);
  std::vector<BlockSpec> out;
  int left = n;
  while (left > 0) {
    int k = kind(rng);
    if (k == 4 && left < 2) continue;
    BlockSpec b;
    b.kind = static_cast<BlockKind>(k);
    if (k == 0) b.a = a(rng);
    if (k == 1) b.a = -a(rng);
    if (k == 2 || k == 3) {
      const double t = theta(rng) * (k == 2 ? 1 : -1);
      b.a1 = std::cos(t);
      b.a2 = std::sin(t);
    }
    if (k == 4) {
      const double rr = r(rng), t = phase(rng);
      b.a1 = rr * std::cos(t);
      b.a2 = rr * std::sin(t);
    }
    out.push_back(b);
    left -= block_half_dim(b);
  }
  return out;
}

RMat random_symplectic(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0, scale);
  RMat s(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = g(rng);
  RMat b = hamiltonian_from_form(s);
  return b.exp();
}

}  // namespace equihf
