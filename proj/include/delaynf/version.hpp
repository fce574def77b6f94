#pragma once

namespace delaynf {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace delaynf
