#pragma once

namespace fermat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fermat
