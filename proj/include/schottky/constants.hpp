#pragma once

#include <complex>

namespace schottky {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr Complex kI{0.0, 1.0};

}  // namespace schottky
