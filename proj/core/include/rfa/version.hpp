#pragma once

namespace rfa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rfa
