// File formats: exact rationals, the JSON complex format.
#pragma once

#include <optional>
#include <string>

#include "equihf/complexes.hpp"

namespace equihf {

Action parse_action(const std::string& s);  // "p/q" or "p"
std::string format_action(const Action& a);

// {"ring": "GF2", "grading": "Z", "strict_action": false,
//  "generators": [{"name": "x", "degree": 0, "action": "1/2"}, ...],
//  "differential": [["y", "x", "1+h"], ...],
//  "involution": {"permutation": ["x", "y"]} or {"matrix": [[0, 1], [1, 0]]}}
struct ComplexFile {
  GradedComplex complex;
  std::optional<BitMatrix> involution;
};

ComplexFile parse_complex_json(const std::string& text);
std::string complex_to_json(const ComplexFile& f);

}  // namespace equihf
