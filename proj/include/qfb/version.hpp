#pragma once

namespace qfb {
inline constexpr const char* kVersion = "0.1.0";
}
