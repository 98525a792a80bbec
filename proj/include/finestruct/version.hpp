#pragma once

#include <string_view>

namespace finestruct {

inline constexpr std::string_view kToolName = "finestruct";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace finestruct
