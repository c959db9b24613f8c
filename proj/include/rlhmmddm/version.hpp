#pragma once

namespace rlhmmddm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rlhmmddm
