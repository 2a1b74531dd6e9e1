#pragma once

namespace truchet {

inline constexpr const char* kToolName = "truchet";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace truchet
