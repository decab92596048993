#pragma once

#include <string_view>
#include <vector>

#include "opaque/bytes.hpp"

namespace opaque {

/// Consensus of a cluster's requests: octets and wildcards, never gaps.
struct Prototype {
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  bool all_wildcards() const noexcept {
    for (Symbol s : symbols)
      if (s != kWildcard) return false;
    return true;
  }

  friend bool operator==(const Prototype&, const Prototype&) = default;
};

/// One positive weight per prototype symbol, each in (0, 1].
struct Weights {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Builds a prototype from text where '?' denotes a wildcard. Test and
/// tooling convenience; a literal '?' octet cannot be expressed this way.
inline Prototype prototype_from_pattern(std::string_view pattern) {
  Prototype p;
  p.symbols.reserve(pattern.size());
  for (char c : pattern) {
    p.symbols.push_back(c == '?' ? kWildcard : static_cast<Symbol>(static_cast<unsigned char>(c)));
  }
  return p;
}

}  // namespace opaque
