#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gnnsteal {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent seed streams.
std::uint64_t mix_seed(std::uint64_t value);

/// Folds several values into one seed; order-sensitive.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salt);

}  // namespace gnnsteal
