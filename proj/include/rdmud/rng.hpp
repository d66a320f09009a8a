#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rdmud {

using Rng = std::mt19937_64;

// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Folds a sequence of words into one seed. Order-sensitive.
std::uint64_t combine_seed(std::initializer_list<std::uint64_t> words) noexcept;

// FNV-1a; stable across platforms and runs (unlike std::hash).
std::uint64_t stable_hash(std::string_view text) noexcept;

// Bit pattern of a double, so real-valued keys can feed combine_seed.
std::uint64_t double_bits(double value) noexcept;

// Counter-based stream: the generator for trial `index` of the stream keyed by
// `stream_seed`. Independent of which worker evaluates the trial.
Rng stream_rng(std::uint64_t stream_seed, std::uint64_t index);

}  // namespace rdmud
