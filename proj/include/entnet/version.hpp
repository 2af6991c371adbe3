#pragma once

namespace entnet {

inline constexpr const char* kVersion = "1.0.0";

} // namespace entnet
