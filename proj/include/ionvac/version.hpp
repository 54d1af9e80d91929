#pragma once

namespace ionvac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ionvac
