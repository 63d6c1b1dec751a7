#pragma once

namespace wpscert {

inline constexpr const char* tool_name = "wpscert";
inline constexpr const char* tool_version = "1.0.0";

}
