#pragma once

#include <cstdint>
#include <random>

namespace elm {

using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of a master seed. Streams are
/// derived with a SplitMix64 mix, so (seed, stream) fully determines output.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace elm
