// Z/2-equivariant cohomology of involutive complexes: the Borel complex,
// group and Tate cohomology, the h-sequence, Smith bounds, the squaring map.
#pragma once

#include <string>
#include <vector>

#include "equihf/complexes.hpp"

namespace equihf {

struct EqModuleInvariants {
  int free_rank = 0;
  std::vector<int> torsion_exponents;  // positive, ascending
  int generator_count = 0;
  bool operator==(const EqModuleInvariants&) const = default;
};

// Throws InputError unless iota is a degree-0 chain map with iota^2 = id.
void validate_involutive(const InvolutiveComplex& w);

// d_V + h(id + iota) over GF(2)[h].
GradedComplex borel_complex(const InvolutiveComplex& w);

// Module invariants of H(F, d) over the local ring at (h), for d^2 = 0.
EqModuleInvariants local_module_invariants(const PolyMatrix& d);

EqModuleInvariants group_cohomology(const InvolutiveComplex& w);
int tate_dimension(const InvolutiveComplex& w);

struct USequenceReport {
  int truncation = 0;
  int dim_h_lower = 0, dim_h_upper = 0, dim_h_v = 0;  // H(C/h^{N-1}), H(C/h^N), H(V)
  int rank_h = 0, rank_restrict = 0, rank_connecting = 0;
  bool exact_at_upper = false, exact_at_v = false, exact_at_lower = false;
  bool exact() const { return exact_at_upper && exact_at_v && exact_at_lower; }
};

// Long exact sequence of 0 -> C/h^{N-1} -h-> C/h^N -> V -> 0, checked as an
// ungraded exact triangle by rank computations.
USequenceReport verify_u_sequence(const InvolutiveComplex& w, int truncation = 4);

struct SmithBoundReport {
  int invariant_dim = 0;  // dim H(V)^iota
  int generator_count = 0;
  int free_rank = 0;
  bool holds() const { return invariant_dim >= generator_count && generator_count >= free_rank; }
};
SmithBoundReport smith_bound_check(const InvolutiveComplex& w);

// c (x) c in the Borel complex of the swap square; c must be a cocycle.
PolyVec squaring_map(const GradedComplex& v, const BitVec& c);

// For c' = c + d w, checks that sq(c') - sq(c) is the coboundary of
// c(x)w + w(x)c + w(x)dw + h w(x)w, and that it lies in the image of d_C.
bool squaring_well_defined(const GradedComplex& v, const BitVec& c, const BitVec& w);

struct KaledinReport {
  int dim_h = 0;       // dim H(V)
  int dim_tate = 0;    // Tate dimension of the swap square
  int image_rank = 0;  // rank of the squares modulo coboundaries over GF(2)(h)
  PolyMatrix squares;  // columns: squares of the cohomology basis lifts
  bool bijective() const { return dim_h == dim_tate && image_rank == dim_h; }
};
KaledinReport kaledin_check(const GradedComplex& v);

// C/h^N as a GF(2) complex on generators y.h^j (j < N), degree |y| + j.
// Generator y.h^j sits at index j * size + y.
GradedComplex truncate_complex(const GradedComplex& c, int n);

}  // namespace equihf
