#pragma once

namespace curvecert {

inline constexpr const char* kToolName = "curvecert";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace curvecert
