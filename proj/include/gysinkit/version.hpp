#pragma once

namespace gysinkit {
inline constexpr const char* kVersion = "0.1.0";
}
