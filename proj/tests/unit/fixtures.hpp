#pragma once

#include <string>

#include "biflab/family_io.hpp"

namespace fixtures {

inline biflab::FamilySpec family(const std::string& name) {
  return biflab::load_family(std::string(BIFLAB_FAMILY_DIR) + "/" + name + ".fam");
}

}  // namespace fixtures
