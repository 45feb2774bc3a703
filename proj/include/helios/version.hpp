#pragma once

namespace helios {
inline constexpr const char* kVersion = "0.1.0";
}
