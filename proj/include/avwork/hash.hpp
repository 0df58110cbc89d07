/*
 * Copyright 2026 The avwork Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string_view>

namespace avwork {

// Stable non-cryptographic hashing used for penetration selection and for
// deriving independent RNG substreams. These functions are part of the output
// contract: changing any constant changes which vehicles a given seed selects.
//
//   hash64(seed, id) = splitmix64_mix(fnv1a64(le64(seed) || bytes(id)))
//
// fnv1a64 uses offset basis 0xcbf29ce484222325 and prime 0x100000001b3;
// le64(seed) is the seed serialized as 8 little-endian bytes.

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64_update(std::uint64_t h, std::string_view bytes) {
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a64_update(std::uint64_t h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
  return h;
}

/// splitmix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash64(std::uint64_t seed, std::string_view id) {
  return splitmix64_mix(fnv1a64_update(fnv1a64_update(kFnvOffsetBasis, seed), id));
}

/// Maps a 64-bit value onto [0, 1) using its top 53 bits; exact in a double.
constexpr double unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Derives a substream seed from a root seed and a sequence of integer keys.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = splitmix64_mix(root + 0x9e3779b97f4a7c15ULL);
  s = splitmix64_mix(s ^ (a + 0x9e3779b97f4a7c15ULL));
  s = splitmix64_mix(s ^ (b + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace avwork
