#pragma once

// Canonical report comparison: wall-clock timing is the one field that
// legitimately differs between identical runs, so it is stripped before the
// byte comparison.

#include <string>

#include "json.hpp"

namespace report_compare {

inline void strip_wall_seconds(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("wall_seconds");
    for (auto& [key, value] : j.items()) {
      (void)key;
      strip_wall_seconds(value);
    }
  } else if (j.is_array()) {
    for (auto& value : j) strip_wall_seconds(value);
  }
}

inline std::string canonical_bytes(nlohmann::json j) {
  strip_wall_seconds(j);
  return j.dump(2);
}

}  // namespace report_compare
