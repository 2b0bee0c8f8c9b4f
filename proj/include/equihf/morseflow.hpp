// Broken gradient trajectories of the height function on S^infinity: strata of
// the compactified spaces of unparametrized (Q) and parametrized (P) flow
// lines ending at v^{0,+}, their codimension one faces with the terms they
// contribute to the product relations, and the round-metric chart.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "equihf/errors.hpp"

namespace equihf {

enum class SpaceKind { Q, P };

struct Factor {
  int i = 1;
  int sign = 1;  // +1 or -1
  bool marked = false;
  bool operator==(const Factor&) const = default;
  auto operator<=>(const Factor&) const = default;
};

// Factors are listed from the source v^{i,sigma} towards v^{0,+}.
struct Stratum {
  SpaceKind kind = SpaceKind::Q;
  std::vector<Factor> factors;

  int total() const;
  int sign() const;
  int codim() const { return static_cast<int>(factors.size()) - 1; }
  int marked_index() const;  // -1 for Q
  std::string str() const;   // "Q^{1,+} x P^{0,+}"
  std::string corner_label() const;  // "(+)+-": signs, marked factor in parentheses
  bool operator==(const Stratum&) const = default;
  auto operator<=>(const Stratum&) const = default;
};

std::vector<Stratum> enumerate_strata(SpaceKind kind, int i, int sigma, std::optional<int> codim = std::nullopt);
long long corner_count(int i);  // 2^{i-1} (i+1)

// The stratum-level map induced by reflecting the coordinate nu_i: it flips the
// sign of the first factor with positive index, and is a bijection between
// the strata for sigma and -sigma.
Stratum reflect_top(const Stratum& s);

struct FaceTerm {
  enum class Kind { Zero, Product, DiffProduct };
  Kind kind = Kind::Zero;
  int p_i = 0, p_sign = 1;
  bool swap = false;
  int d_i = 0, d_sign = 1;
  std::string str() const;  // "p^{1,-} . swap", "d_eq^{1,-} . p^{1,-}", "0"
  bool operator==(const FaceTerm&) const = default;
};

struct Face {
  Stratum stratum;
  bool pq = true;  // P x Q (true) or Q x P
  FaceTerm term;
};

// Term contributed by a codimension one stratum of P^{i,sigma}.
FaceTerm face_term(const Stratum& face);
std::vector<Face> codim1_faces(int i, int sigma);

// Nonzero face terms, principal terms first and then by increasing d-index.
std::vector<FaceTerm> relation_terms(int i, int sigma);
std::string relation_rhs(int i, int sigma);
// The same sum generated directly from the algebraic form of the relation.
std::vector<FaceTerm> relation_formula(int i, int sigma);
std::string terms_str(const std::vector<FaceTerm>& ts);

struct FlowPoint {
  int i = 1;
  int sigma = 1;
  std::vector<double> coords;  // chart coordinates in R^{i-1}
  std::vector<double> w0;      // (nu_0, ..., nu_i) at s = 0
  std::vector<double> s;       // sample times
  std::vector<std::vector<double>> w;
};

std::vector<double> flow_at(const std::vector<double>& w0, double s);
FlowPoint flow_chart(int i, int sigma, const std::vector<double>& x, int samples = 512, double s_max = 20);
// Chart coordinates of the flow line through a point (nu_0, ..., nu_i).
std::vector<double> chart_inverse(int i, int sigma, const std::vector<double>& point);

std::string sign_char(int s);

}  // namespace equihf
