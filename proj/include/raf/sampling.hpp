#pragma once

#include <cstdint>

#include "raf/pole.hpp"

namespace raf {

// Draws M pole groups (a conjugate pair counts as one group) i.i.d. from the
// region's radial law x uniform angle over the band union.  Deterministic for
// fixed (region, M, seed).
PoleSet sample_poles(const PoleRegion& region, int M, std::uint64_t seed);

}  // namespace raf
