#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mubench/sequence.hpp"

namespace mubench {

/// Flag sequence whose first zero sits at `index` (none when negative), with
/// arbitrary nonzero noise before it and arbitrary values after.
inline PresentedSequence flag_with_first_zero(std::mt19937_64& rng, int index) {
  if (index < 0) {
    std::vector<Nat> tail(1 + rng() % 3);
    for (auto& v : tail) v = 1 + rng() % 3;
    return {{}, tail};
  }
  std::vector<Nat> prefix(static_cast<std::size_t>(index) + 1);
  for (auto& v : prefix) v = 1 + rng() % 3;
  prefix.back() = 0;
  std::vector<Nat> tail(1 + rng() % 3);
  for (auto& v : tail) v = rng() % 3;
  return {prefix, tail};
}

/// Flag sequences covering: no zero, first zero at 0, 1, 3, 7 and 17, a first
/// zero inside the periodic tail, and random positions up to 14.
inline std::vector<PresentedSequence> extraction_corpus(std::uint64_t seed, std::size_t size = 120) {
  std::mt19937_64 rng(seed);
  std::vector<PresentedSequence> out;
  for (int fixed : {-1, 0, 1, 3, 7, 17}) {
    for (int copies = 0; copies < 3; ++copies) out.push_back(flag_with_first_zero(rng, fixed));
  }
  for (int copies = 0; copies < 6; ++copies) {
    std::vector<Nat> prefix(rng() % 4), tail(2 + rng() % 3);
    for (auto& v : prefix) v = 1 + rng() % 3;
    for (auto& v : tail) v = 1 + rng() % 3;
    tail[1 + rng() % (tail.size() - 1)] = 0;
    out.emplace_back(prefix, tail);
  }
  while (out.size() < size) {
    out.push_back(rng() % 5 == 0 ? flag_with_first_zero(rng, -1)
                                 : flag_with_first_zero(rng, static_cast<int>(rng() % 15)));
  }
  return out;
}

}  // namespace mubench
