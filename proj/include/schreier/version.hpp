#pragma once

namespace schreier {

inline constexpr const char* version = "0.1.0";

}  // namespace schreier
