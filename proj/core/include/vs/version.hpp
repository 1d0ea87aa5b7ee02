#pragma once

namespace vs {

inline constexpr const char* kToolName = "vocab-surgeon";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace vs
