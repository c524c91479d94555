#pragma once

namespace swarmlab {
inline constexpr const char* kVersion = "0.1.0";
}
