#pragma once

namespace wcpl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wcpl
