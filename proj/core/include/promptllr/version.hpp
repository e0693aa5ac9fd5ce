#pragma once

namespace promptllr {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace promptllr
