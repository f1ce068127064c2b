#pragma once

namespace matder {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace matder
