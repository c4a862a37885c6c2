#pragma once

namespace glovekit {

inline constexpr const char* kGlovekitVersion = "0.1.0";

} // namespace glovekit
