#pragma once

namespace isinglab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace isinglab
