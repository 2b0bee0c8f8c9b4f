// Finite graded chain complexes over GF(2), GF(2)[h] and GF(2)(h); cohomology,
// chain maps, the swap square and spectral sequences of filtered complexes.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "equihf/errors.hpp"
#include "equihf/gf2.hpp"
#include "equihf/scalars.hpp"

namespace equihf {

using Action = boost::rational<long long>;

enum class Ring { GF2, Poly, Frac };
enum class Grading { Z, Z2 };

std::string ring_name(Ring r);
Ring parse_ring(const std::string& s);

struct Generator {
  std::string name;
  int degree = 0;  // reduced mod 2 when the grading is Z2
  std::optional<Action> action;
};

// Differential stored as d(target, source); columns are d applied to generators.
struct GradedComplex {
  Ring ring = Ring::GF2;
  Grading grading = Grading::Z;
  std::vector<Generator> gens;
  PolyMatrix d;
  bool strict_action = false;

  int size() const { return static_cast<int>(gens.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
  // Builds an empty differential of the right size.
  static GradedComplex make(Ring r, Grading g, std::vector<Generator> gens);
};

struct CheckReport {
  bool structural_ok = true;
  bool d_squared_zero = true;
  std::vector<std::string> structural;
  std::vector<std::string> grading_violations;
  std::vector<std::string> action_violations;
  bool ok() const {
    return structural_ok && d_squared_zero && grading_violations.empty() && action_violations.empty();
  }
};

CheckReport check_complex(const GradedComplex& c);

// Is an entry h^k in d(x) with target y consistent with |y| = |x| + 1 - k?
bool degree_ok(const GradedComplex& c, int target, int source, const HPoly& entry);

struct CohomologyResult {
  Ring ring = Ring::GF2;
  std::map<int, int> dims;  // GF(2): per degree
  int total = 0;            // GF(2), GF(2)(h): total dimension; GF(2)[h]: free rank
  int free_rank = 0;
  std::vector<HPoly> invariant_factors;  // GF(2)[h]: non-unit factors
  int torsion_dim = 0;                   // GF(2)-dimension of the torsion part
};

CohomologyResult cohomology(const GradedComplex& c);

// Cocycles and coboundaries of a GF(2) complex as subspaces of GF(2)^N.
struct CocycleData {
  std::vector<BitVec> cycles;
  std::vector<BitVec> boundaries;
};
CocycleData cocycles(const BitMatrix& d);

// Induced endomorphism of H(V) for a chain map f: V -> V over GF(2), in the
// basis of cocycle lifts chosen by the Quotient of cycles by boundaries.
BitMatrix induced_on_cohomology(const BitMatrix& d, const BitMatrix& f);

struct InvolutiveComplex {
  GradedComplex complex;  // over GF(2)
  BitMatrix iota;
};

// V (x) V with the Leibniz differential and the factor swap.
InvolutiveComplex tensor_square_swap(const GradedComplex& v);
int pair_index(int n, int a, int b);

struct ChainMap {
  PolyMatrix f;  // target x source
  int shift = 0;
};

bool is_chain_map(const GradedComplex& src, const GradedComplex& dst, const ChainMap& f);

struct QuasiIsoReport {
  bool chain_map = false;
  bool quasi_iso = false;
  int dim_source = 0, dim_target = 0, induced_rank = 0;
};
// GF(2): rank of the induced map on cohomology; GF(2)[h]: the mapping cone is
// acyclic over the local ring; GF(2)(h): the mapping cone has full rank.
QuasiIsoReport quasi_iso_check(const GradedComplex& src, const GradedComplex& dst, const ChainMap& f);

// Mapping cone [[d_src, 0], [f, d_dst]] on src (+) dst.
PolyMatrix mapping_cone(const PolyMatrix& d_src, const PolyMatrix& d_dst, const PolyMatrix& f);

// Decreasing filtration: F^p is spanned by generators of weight >= p.
struct Filtration {
  std::vector<int> weight;
};

struct SpectralPage {
  int r = 0;
  std::map<std::pair<int, int>, int> dims;  // (p, degree) -> dim E_r
  std::map<std::pair<int, int>, BitMatrix> d;  // (p, degree) -> d_r : E_r^{p,k} -> E_r^{p+r,k+1}
  int total() const;
};

struct SpectralSequence {
  std::vector<SpectralPage> pages;
  int stable_page = 0;
  bool consistent = true;          // E_{r+1} = H(E_r, d_r) dimension-wise
  bool abutment_matches = true;    // total E_infinity = dim H
  int e_infinity_total = 0;
  int cohomology_total = 0;
};

// Requires a GF(2) complex whose differential does not decrease weights.
SpectralSequence spectral_sequence(const GradedComplex& c, const Filtration& f);

}  // namespace equihf
