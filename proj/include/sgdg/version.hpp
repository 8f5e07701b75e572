#pragma once

namespace sgdg {
inline constexpr const char* kVersion = "sgdg 0.1.0";
}
