#pragma once

namespace fmm {
inline constexpr const char* kVersion = "0.1.0";
}
