#pragma once

namespace roodbench {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace roodbench
