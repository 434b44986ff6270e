#pragma once

namespace chipfire {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chipfire
