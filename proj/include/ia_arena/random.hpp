#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ia_arena {

using Rng = std::mt19937_64;

// Derives an independent seed for a named stream. The derivation is
// counter based: (master, name, index) always maps to the same value, so
// adding a new stream never shifts the draws of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

Rng make_stream(std::uint64_t master, std::string_view stream,
                std::uint64_t index = 0);

// FNV-1a, used for stream names and config hashes.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace ia_arena
