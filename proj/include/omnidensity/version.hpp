#pragma once

namespace omni {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace omni
