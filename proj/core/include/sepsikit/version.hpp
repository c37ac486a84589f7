#pragma once

namespace sepsikit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sepsikit
