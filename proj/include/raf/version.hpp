#pragma once

namespace raf {

inline constexpr const char* kVersion = "0.1.0";

// Identifier of the pseudo-random generator recorded in output files.
inline constexpr const char* kRngId = "mt19937_64/raw53";

}  // namespace raf
