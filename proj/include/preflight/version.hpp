#pragma once

namespace preflight {

inline constexpr const char* kToolName = "preflight";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace preflight
