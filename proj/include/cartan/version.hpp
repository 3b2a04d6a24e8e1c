#pragma once

namespace cartan {

inline constexpr const char* version = "0.1.0";

}  // namespace cartan
