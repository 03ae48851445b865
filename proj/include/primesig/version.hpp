#pragma once

namespace primesig {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace primesig
