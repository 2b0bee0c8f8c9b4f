// Abstract Floer data: the complexes CF(phi), CF(phi^2), the loop rotation rho,
// the components d_eq^{i,sigma} of the equivariant differential and the
// components p^{i,sigma} of the equivariant pair-of-pants product, stored as
// GF(2) matrices. The geometry enters only through the algebraic relations
// these matrices have to satisfy, which validate() checks one by one.
#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "equihf/complexes.hpp"
#include "equihf/equivariant.hpp"

namespace equihf {

enum class FloerMode { Exact, Monotone };

std::string mode_name(FloerMode m);

struct FixedPoint {
  std::string name;
  int degree = 0;
  Action action{0};
  std::optional<int> krein;    // kappa(D phi_x)
  std::optional<int> detsign;  // sign det(I - D phi_x)
  bool operator==(const FixedPoint&) const = default;
};

struct PeriodicPoint {
  std::string name;
  int degree = 0;
  Action action{0};
  bool operator==(const PeriodicPoint&) const = default;
};

using Level = std::pair<int, int>;  // (i, sigma)

struct FloerDatum {
  std::string name;
  FloerMode mode = FloerMode::Exact;
  Grading grading = Grading::Z;
  int n = 1;
  Action epsilon{1, 20};
  std::vector<FixedPoint> fix_phi;
  std::vector<PeriodicPoint> fix_phi2;
  std::vector<int> rho;  // permutation of fix_phi2
  BitMatrix d_phi;       // m x m, d(target, source)
  BitMatrix d_phi2;      // N x N
  std::map<Level, BitMatrix> d_eq;   // i >= 1, N x N
  std::map<Level, BitMatrix> pants;  // i >= 0, N x m^2, column pair_index(m, x+, x-)

  int m() const { return static_cast<int>(fix_phi.size()); }
  int size2() const { return static_cast<int>(fix_phi2.size()); }
  int max_d_level() const;
  int max_p_level() const;
  // Zero matrices for absent levels.
  BitMatrix deq(int i, int sigma) const;
  BitMatrix p(int i, int sigma) const;
  BitMatrix rho_matrix() const;
  // Index in fix_phi2 of each fixed point of phi (-1 if missing).
  std::vector<int> embedding() const;
  bool operator==(const FloerDatum&) const = default;
};

struct Diagnostic {
  std::string check;
  std::string detail;
};

struct ValidationReport {
  std::vector<std::pair<std::string, bool>> checks;  // in evaluation order
  std::vector<Diagnostic> failures;
  bool ok() const { return failures.empty(); }
  bool passed(const std::string& check) const;
};

// Check names: structure, degrees, d_squared, rho, actions, action_gaps,
// zero_energy, d_relations, d_eq_squared, continuation, pants_zero,
// pants_action, p_relations, krein, chain_map.
ValidationReport validate(const FloerDatum& d);

// CF(phi) and CF(phi^2) as GF(2) complexes, with actions.
GradedComplex cf_phi(const FloerDatum& d);
GradedComplex cf_phi2(const FloerDatum& d);

// d_phi2 + sum_i h^i (d_eq^{i,+} + d_eq^{i,-}) on CF(phi^2)[h].
GradedComplex equivariant_complex(const FloerDatum& d);

struct FloerInvariants {
  EqModuleInvariants hf_eq;     // over the local ring
  CohomologyResult hf_poly;     // over GF(2)[h]
  int hf_poly_dim = -1;         // GF(2)-dimension, -1 if infinite
  int localized_dim = 0;        // over GF(2)(h)
  bool consistent = true;       // hf_eq free rank <= hf_poly free rank
};
FloerInvariants floer_invariants(const FloerDatum& d);

struct PantsReport {
  GradedComplex source;  // Borel complex of CF(phi) (x) CF(phi)
  GradedComplex target;  // equivariant complex
  PolyMatrix map;        // sum_i h^i p^i
  bool chain_map = false;
  std::vector<std::string> failures;  // "h^i: (y; x+, x-)"
};
PantsReport pants_chain_map(const FloerDatum& d);

struct LocalizedReport {
  bool chain_map = false;
  int dim_source = 0;   // H of the Borel complex over GF(2)(h)
  int dim_target = 0;   // HF_eq over GF(2)(h)
  int dim_hf_phi = 0;   // H(CF(phi))
  bool bijective = false;
  bool e0_bijective = false;   // associated graded map on Tate E1 pages
  bool e0_is_diagonal = false;  // x (x) x -> h^{n - kappa} x, other generators killed
  bool dims_agree = false;
  bool ok() const { return chain_map && bijective && dims_agree; }
};
LocalizedReport localized_check(const FloerDatum& d);

struct FloerSmithReport {
  int h_dim = 0;          // dim H(CF(phi^2))
  int invariant_dim = 0;  // dim H(CF(phi^2))^iota
  int generator_count = 0;
  int free_rank = 0;
  int localized_dim = 0;
  int hf_phi_dim = 0;
  bool smith() const { return invariant_dim >= generator_count && generator_count >= free_rank; }
  bool quantum_smith() const { return invariant_dim >= hf_phi_dim; }
  bool ok() const { return smith() && quantum_smith() && free_rank == localized_dim; }
};
// Throws InputError if d_eq^{1,-} is not a chain map.
FloerSmithReport smith_check(const FloerDatum& d);

// Induced involution iota on H(CF(phi^2)).
BitMatrix floer_iota(const FloerDatum& d);

struct E2Report {
  int truncation = 0;
  std::map<int, int> e2;        // column p -> dim E_2^p of C/h^N
  std::map<int, int> expected;  // group cohomology of (H(CF(phi^2)), iota), truncated
  bool ok() const { return e2 == expected; }
};
E2Report e2_check(const FloerDatum& d, int truncation = 4);

struct TateE1Report {
  std::map<std::string, int> by_level;  // action level -> Tate dimension
  int total = 0;
  int expected = 0;  // dim CF(phi)
  bool ok() const { return total == expected; }
};
TateE1Report tate_e1_check(const FloerDatum& d);

// Maps of the transfer decomposition; k and p are only GF(2)-linear.
struct TransferDecomposition {
  std::vector<int> plus_set;  // one generator per rho-orbit
};

struct TransferReport {
  std::vector<std::string> plus_names;
  BitMatrix d_d;  // on D = span(plus_set)
  int dim_h = 0;
  int hf_poly_dim = -1;
  int free_orbits = 0;
  int iterations = 0;  // longest series
  std::vector<std::pair<std::string, bool>> side_conditions;
  bool side_conditions_hold() const;
  bool ok() const { return side_conditions_hold() && dim_h == hf_poly_dim && dim_h <= free_orbits; }
};
// Throws InputError unless rho is free; the series guard throws NumericError.
TransferReport transfer(const FloerDatum& d, std::optional<TransferDecomposition> t = std::nullopt);

// Built-in data: morse_pair(i, n), twisted_pair(i, n), annulus, clifford, fixed_point.
FloerDatum builtin_example(const std::string& name, int i = 1, int n = 1);
std::vector<std::string> builtin_names();

// Random data passing validate(). Free data have no fixed points of phi.
struct RandomDatumOptions {
  int max_generators = 6;
  bool free = false;
  int max_tries = 200;
};
FloerDatum random_valid_datum(std::mt19937_64& rng, const RandomDatumOptions& opt = {});

// Text format with sections [phi], [phi2], [rho], [d_phi], [d_phi2],
// [d_eq i s], [pants i s].
FloerDatum parse_datum(const std::string& text);
std::string serialize_datum(const FloerDatum& d);

}  // namespace equihf
