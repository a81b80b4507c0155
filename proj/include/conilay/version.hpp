#pragma once

namespace conilay {

inline constexpr const char* kVersion = "0.1.0";

}
