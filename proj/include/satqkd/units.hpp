#pragma once

#include <numbers>

namespace satqkd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEarthRadius = 6371e3;         // m
inline constexpr double kMuEarth = 3.986004418e14;     // m^3 s^-2
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kLightSpeed = 299792458.0;     // m/s

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace satqkd
