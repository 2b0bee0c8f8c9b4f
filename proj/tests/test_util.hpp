#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace testutil {

inline std::uint64_t seed() {
  if (const char* s = std::getenv("EQUIHF_SEED")) return std::stoull(s);
  return 20240611ULL;
}

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(seed() ^ (salt * 0x9E3779B97F4A7C15ULL)); }

}  // namespace testutil
