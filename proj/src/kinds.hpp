#pragma once

#include <map>
#include <string>

namespace qc {

// The four kinds: program types, locations, location sets, local types.
enum class Kind { Star, StarLoc, StarSet, StarLocal };

inline std::string kind_to_string(Kind k) {
  switch (k) {
    case Kind::Star: return "*";
    case Kind::StarLoc: return "loc";
    case Kind::StarSet: return "locset";
    case Kind::StarLocal: return "ty";
  }
  return "?";
}

// Kinding context: type-variable name -> kind.
using KindCtx = std::map<std::string, Kind>;

// Monotonic fresh-name counter used by every renaming substitution.
std::string fresh_name(const std::string& base);

}  // namespace qc
