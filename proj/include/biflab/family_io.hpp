#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "biflab/family.hpp"

namespace biflab {

// Family definition files: UTF-8 key–value text.
//
//   [family]
//   k = 1
//   d = 2
//   kind = polynomial
//   label = quadratic
//
//   [coord 0]
//   2 0 : 1,0
//   0 2 : 0,0 1,0      # λ-coefficients c0 c1 ... as re,im pairs
//
//   [coord 1]
//   0 2 : 1,0
//
// '#' starts a comment. Malformed tables raise ParseError or MalformedFamily.
FamilySpec parse_family(std::string_view text);
FamilySpec load_family(const std::filesystem::path& path);
std::string format_family(const FamilySpec& spec);

}  // namespace biflab
