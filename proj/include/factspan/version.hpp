#pragma once

namespace factspan {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "factspan";

}  // namespace factspan
