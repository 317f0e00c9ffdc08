// Independent reference computations used by tests.
#pragma once

#include <vector>

#include "jpq/value.hpp"

namespace oracle {

/// Every node of v in document preorder, v itself first.
inline void preorder(const jpq::Value& v, std::vector<jpq::Value>& out) {
  out.push_back(v);
  if (v.is_array()) {
    for (const auto& e : v.as_array()) preorder(e, out);
  } else if (v.is_object()) {
    for (const auto& m : v.as_object()) preorder(m.second, out);
  }
}

inline std::vector<jpq::Value> preorder(const jpq::Value& v) {
  std::vector<jpq::Value> out;
  preorder(v, out);
  return out;
}

}  // namespace oracle
