#pragma once

namespace velo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace velo
