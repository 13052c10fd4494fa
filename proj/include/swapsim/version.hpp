#pragma once

namespace swapsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace swapsim
