#pragma once

namespace mcurv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mcurv
