#pragma once

namespace plab {

inline constexpr const char* kToolkitVersion = "poincare-lab 0.1.0";

}  // namespace plab
