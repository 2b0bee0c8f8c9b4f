#include "equihf/morseflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace equihf {

std::string sign_char(int s) { return s > 0 ? "+" : "-"; }

int Stratum::total() const {
  int t = 0;
  for (const auto& f : factors) t += f.i;
  return t;
}

int Stratum::sign() const {
  int s = 1;
  for (const auto& f : factors) s *= f.sign;
  return s;
}

int Stratum::marked_index() const {
  for (size_t k = 0; k < factors.size(); ++k)
    if (factors[k].marked) return static_cast<int>(k);
  return -1;
}

std::string Stratum::str() const {
  std::string out;
  for (size_t k = 0; k < factors.size(); ++k) {
    if (k) out += " x ";
    out += factors[k].marked ? "P" : "Q";
    out += "^{" + std::to_string(factors[k].i) + "," + sign_char(factors[k].sign) + "}";
  }
  return out;
}

std::string Stratum::corner_label() const {
  std::string out;
  for (const auto& f : factors) out += f.marked ? "(" + sign_char(f.sign) + ")" : sign_char(f.sign);
  return out;
}

std::vector<Stratum> enumerate_strata(SpaceKind kind, int i, int sigma, std::optional<int> codim) {
  if (sigma != 1 && sigma != -1) throw InputError("sign must be + or -");
  if (kind == SpaceKind::Q && i < 1) throw InputError("Q^{i,sigma} needs i >= 1");
  if (kind == SpaceKind::P && i < 0) throw InputError("P^{i,sigma} needs i >= 0");
  std::vector<Stratum> out;
  std::vector<Factor> cur;
  std::function<void(int, bool)> rec = [&](int left, bool have_mark) {
    const bool complete = left == 0 && !cur.empty() && (kind == SpaceKind::Q || have_mark);
    if (complete) {
      Stratum s{kind, cur};
      if (s.sign() == sigma && (!codim || s.codim() == *codim)) out.push_back(s);
    }
    if (kind == SpaceKind::P && !have_mark) {
      for (int m = 0; m <= left; ++m)
        for (int sg : {1, -1}) {
          if (m == 0 && sg < 0) continue;
          cur.push_back({m, sg, true});
          rec(left - m, true);
          cur.pop_back();
        }
    }
    for (int m = 1; m <= left; ++m)
      for (int sg : {1, -1}) {
        cur.push_back({m, sg, false});
        rec(left - m, have_mark);
        cur.pop_back();
      }
  };
  rec(i, false);
  std::sort(out.begin(), out.end(), [](const Stratum& a, const Stratum& b) {
    if (a.codim() != b.codim()) return a.codim() < b.codim();
    return a.factors < b.factors;
  });
  return out;
}

long long corner_count(int i) {
  if (i < 1) throw InputError("corner_count needs i >= 1");
  return (1LL << (i - 1)) * (i + 1);
}

Stratum reflect_top(const Stratum& s) {
  Stratum r = s;
  for (auto& f : r.factors)
    if (f.i > 0) {
      f.sign = -f.sign;
      return r;
    }
  throw InputError("reflect_top: stratum has no factor of positive index");
}

std::string FaceTerm::str() const {
  const std::string p = "p^{" + std::to_string(p_i) + "," + sign_char(p_sign) + "}";
  switch (kind) {
    case Kind::Zero: return "0";
    case Kind::Product: return swap ? p + " . swap" : p;
    case Kind::DiffProduct: return "d_eq^{" + std::to_string(d_i) + "," + sign_char(d_sign) + "} . " + p;
  }
  return "?";
}

FaceTerm face_term(const Stratum& face) {
  if (face.kind != SpaceKind::P || face.factors.size() != 2 || face.marked_index() < 0)
    throw InputError("face_term: not a codimension one face of a P space: " + face.str());
  FaceTerm t;
  const Factor& a = face.factors[0];
  const Factor& b = face.factors[1];
  if (a.marked) {
    // P^{k,rho} x Q^{m,tau}: only m = 1 survives, exchanging inputs when tau = -
    if (b.i == 1) {
      t.kind = FaceTerm::Kind::Product;
      t.p_i = a.i;
      t.p_sign = a.sign;
      t.swap = b.sign < 0;
    }
  } else {
    t.kind = FaceTerm::Kind::DiffProduct;
    t.d_i = a.i;
    t.d_sign = a.sign;
    t.p_i = b.i;
    t.p_sign = b.sign;
  }
  return t;
}

std::vector<Face> codim1_faces(int i, int sigma) {
  if (i < 1) throw InputError("codim1_faces needs i >= 1");
  if (sigma != 1 && sigma != -1) throw InputError("sign must be + or -");
  std::vector<Face> out;
  auto add = [&](Factor x, Factor y, bool pq) {
    Stratum s{SpaceKind::P, {x, y}};
    out.push_back({s, pq, face_term(s)});
  };
  for (int k = 0; k < i; ++k) add({k, 1, true}, {i - k, sigma, false}, true);
  for (int k = 1; k < i; ++k) add({k, -1, true}, {i - k, -sigma, false}, true);
  for (int a = 1; a <= i; ++a) add({a, sigma, false}, {i - a, 1, true}, false);
  for (int a = 1; a < i; ++a) add({a, -sigma, false}, {i - a, -1, true}, false);
  return out;
}

namespace {

void order_terms(std::vector<FaceTerm>& ts, int sigma) {
  auto key = [sigma](const FaceTerm& t) {
    if (t.kind == FaceTerm::Kind::Product) return std::make_tuple(0, t.p_sign == sigma ? 0 : 1, 0);
    return std::make_tuple(1, t.d_i, t.d_sign > 0 ? 0 : 1);
  };
  std::stable_sort(ts.begin(), ts.end(), [&](const FaceTerm& a, const FaceTerm& b) { return key(a) < key(b); });
}

}  // namespace

std::vector<FaceTerm> relation_terms(int i, int sigma) {
  std::vector<FaceTerm> ts;
  for (const auto& f : codim1_faces(i, sigma))
    if (f.term.kind != FaceTerm::Kind::Zero) ts.push_back(f.term);
  order_terms(ts, sigma);
  return ts;
}

std::vector<FaceTerm> relation_formula(int i, int sigma) {
  if (i < 1) throw InputError("relation needs i >= 1");
  std::vector<FaceTerm> ts;
  auto product = [&](int k, int s, bool swap) {
    if (k == 0 && s < 0) return;
    FaceTerm t;
    t.kind = FaceTerm::Kind::Product;
    t.p_i = k;
    t.p_sign = s;
    t.swap = swap;
    ts.push_back(t);
  };
  auto dp = [&](int a, int ds, int b, int ps) {
    if (b == 0 && ps < 0) return;
    FaceTerm t;
    t.kind = FaceTerm::Kind::DiffProduct;
    t.d_i = a;
    t.d_sign = ds;
    t.p_i = b;
    t.p_sign = ps;
    ts.push_back(t);
  };
  product(i - 1, sigma, false);
  product(i - 1, -sigma, true);
  for (int i1 = 1; i1 <= i; ++i1) {
    dp(i1, 1, i - i1, sigma);
    dp(i1, -1, i - i1, -sigma);
  }
  return ts;
}

std::string terms_str(const std::vector<FaceTerm>& ts) {
  if (ts.empty()) return "0";
  std::string out;
  for (size_t k = 0; k < ts.size(); ++k) out += (k ? " + " : "") + ts[k].str();
  return out;
}

std::string relation_rhs(int i, int sigma) { return terms_str(relation_terms(i, sigma)); }

std::vector<double> flow_at(const std::vector<double>& w0, double s) {
  const int n = static_cast<int>(w0.size());
  std::vector<double> logs(n, -INFINITY);
  double m = -INFINITY;
  for (int k = 0; k < n; ++k)
    if (w0[k] != 0) {
      logs[k] = std::log(std::abs(w0[k])) - 2.0 * k * s;
      m = std::max(m, logs[k]);
    }
  std::vector<double> v(n, 0.0);
  double norm2 = 0;
  for (int k = 0; k < n; ++k)
    if (w0[k] != 0) {
      v[k] = std::copysign(std::exp(logs[k] - m), w0[k]);
      norm2 += v[k] * v[k];
    }
  const double norm = std::sqrt(norm2);
  for (auto& x : v) x /= norm;
  return v;
}

FlowPoint flow_chart(int i, int sigma, const std::vector<double>& x, int samples, double s_max) {
  if (i < 1) throw InputError("flow_chart needs i >= 1");
  if (sigma != 1 && sigma != -1) throw InputError("sign must be + or -");
  if (static_cast<int>(x.size()) != i - 1)
    throw InputError("flow_chart: expected " + std::to_string(i - 1) + " chart coordinates");
  FlowPoint fp;
  fp.i = i;
  fp.sigma = sigma;
  fp.coords = x;
  std::vector<double> nu{1.0};
  nu.insert(nu.end(), x.begin(), x.end());
  nu.push_back(sigma);
  fp.w0 = flow_at(nu, 0);
  const int neg = samples / 2, pos = samples - neg;
  const double lo = 1e-3;
  auto mag = [&](int j, int count) { return count == 1 ? s_max : lo * std::pow(s_max / lo, double(j) / (count - 1)); };
  for (int j = neg - 1; j >= 0; --j) fp.s.push_back(-mag(j, neg));
  for (int j = 0; j < pos; ++j) fp.s.push_back(mag(j, pos));
  for (double s : fp.s) fp.w.push_back(flow_at(fp.w0, s));
  return fp;
}

std::vector<double> chart_inverse(int i, int sigma, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != i + 1) throw InputError("chart_inverse: expected i+1 coordinates");
  if (!(u[0] > 0) || !(sigma * u[i] > 0)) throw InputError("chart_inverse: point is not on a flow line in Q^{i,sigma}");
  // u_k / u_0 = x_k e^{-2ks}, and sigma u_i / u_0 = e^{-2is}
  const double s = -std::log(sigma * u[i] / u[0]) / (2.0 * i);
  std::vector<double> x;
  for (int k = 1; k < i; ++k) x.push_back(u[k] / u[0] * std::exp(2.0 * k * s));
  return x;
}

}  // namespace equihf
