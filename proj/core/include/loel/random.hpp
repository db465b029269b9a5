#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace loel {

using Rng = std::mt19937_64;

// Stream seed derived from a base seed and a list of tags via splitmix64 mixing,
// so that independent tasks get independent, schedule-free random streams.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

std::uint64_t tag_of(std::string_view name);

// Seed tag for a real-valued key such as a grid spacing in mm.
std::uint64_t tag_of(double value);

// 64-bit FNV-1a, used for config hashes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace loel
