#pragma once

namespace kornlab {

inline constexpr const char* version_string = "kornlab 0.1.0";

} // namespace kornlab
