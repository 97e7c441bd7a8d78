#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace qtwalk {

// 64-bit FNV-1a. Used for fingerprints and per-root seed derivation, where a
// platform-independent value is required (std::hash is not).
class Fnv1a64 {
 public:
  void update(std::string_view bytes) noexcept {
    for (const char c : bytes) {
      state_ ^= static_cast<unsigned char>(c);
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const noexcept { return state_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  Fnv1a64 h;
  h.update(bytes);
  return h.value();
}

}  // namespace qtwalk
