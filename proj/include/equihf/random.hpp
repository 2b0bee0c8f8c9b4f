// Random finite complexes for property tests and the acceptance suite.
// Every complex is a direct sum of small standard pieces, conjugated by a
// random degree-preserving change of basis.
#pragma once

#include <random>
#include <utility>

#include "equihf/complexes.hpp"

namespace equihf {

enum class InvolutionKind {
  General,        // trivial, free and mixed pieces
  LevelwiseFree,  // iota acts freely on a basis in every degree
  Acyclic,        // H(V) = 0
  Trivial         // iota = id
};

GradedComplex random_complex(std::mt19937_64& rng, int max_dim, bool acyclic = false);

InvolutiveComplex random_involutive(std::mt19937_64& rng, int max_dim, InvolutionKind kind = InvolutionKind::General);

// A GF(2) complex together with a decreasing filtration respected by d.
std::pair<GradedComplex, Filtration> random_filtered(std::mt19937_64& rng, int max_dim);

// Random invertible degree-preserving matrix; if weights are given, it also
// preserves the decreasing filtration they define.
BitMatrix random_graded_automorphism(std::mt19937_64& rng, const std::vector<int>& degrees,
                                     const std::vector<int>* weights = nullptr);

}  // namespace equihf
