#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sagin {

/// Independent generator for one (seed, tags...) substream.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

enum RngTag : std::uint64_t {
  kTagRain = 0x7261696e,
  kTagPlacement = 0x706c6163,
};

}  // namespace sagin
