#pragma once

namespace cvqkd {

constexpr double kEarthRadiusKm = 6371.0;

// Atmosphere thickness from ground to zenith holding ~95% of the air mass.
constexpr double kAtmosphereThicknessKm = 20.0;

// Chord midpoints of inter-satellite links must stay above the atmosphere.
constexpr double kMinChainAltitudeKm = kAtmosphereThicknessKm;

constexpr double kDefaultWavelengthM = 1550e-9;
constexpr double kDefaultRepetitionRateHz = 50e6;

constexpr double kPi = 3.141592653589793238462643383279502884;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace cvqkd
