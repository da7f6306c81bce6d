#pragma once

namespace lifetail {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lifetail
