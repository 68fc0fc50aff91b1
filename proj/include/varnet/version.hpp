#pragma once

namespace varnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace varnet
