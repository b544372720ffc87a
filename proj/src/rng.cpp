// SPDX-License-Identifier: Apache-2.0
#include "mnnas/rng.hpp"

namespace mnnas {

namespace {

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Rng substream(uint64_t seed, std::string_view name) {
  return Rng(splitmix64(seed ^ fnv1a(name)));
}

}  // namespace mnnas
