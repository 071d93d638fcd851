#pragma once

namespace traclets {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace traclets
