// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace lorasim {

inline constexpr std::string_view kToolName = "lorasim";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace lorasim
