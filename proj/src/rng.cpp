#include "rdmud/rng.hpp"

#include <bit>

namespace rdmud {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t double_bits(double value) noexcept {
  if (value == 0.0) value = 0.0;  // fold -0 onto +0
  return std::bit_cast<std::uint64_t>(value);
}

Rng stream_rng(std::uint64_t stream_seed, std::uint64_t index) {
  return Rng(combine_seed({stream_seed, index}));
}

}  // namespace rdmud
