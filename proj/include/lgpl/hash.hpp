#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lgpl {

/// 64-bit FNV-1a. Stable across platforms and runs; used for seed
/// derivation and mock-fixture request keys.
class StableHash {
 public:
  StableHash& add(std::string_view bytes);
  StableHash& add(std::uint64_t value);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t stable_hash(std::string_view bytes);
std::string to_hex(std::uint64_t value);

}  // namespace lgpl
