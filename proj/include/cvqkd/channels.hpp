#pragma once

// Transmittance and loss budgets for the four link families: fibre,
// underwater, inter-satellite, and satellite-ground (uplink/downlink).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cvqkd/constants.hpp"

namespace cvqkd::channels {

// ---------------------------------------------------------------- fibre ----

struct FibreLink {
    double length_km = 0.0;
    // Loss rate entering T = 10^(-attenuation_db_per_km * d / 10). The default
    // 0.2 dB/km reproduces the standard-fibre exponent 0.02*d.
    double attenuation_db_per_km = 0.2;
};

double fibre_transmittance(const FibreLink& link);

// Overall transmittance of a chain of losses: T = prod(1/A_i), each A_i >= 1.
double combine_transmittances(std::span<const double> attenuation_ratios);

// ----------------------------------------------------------- underwater ----

enum class WaterPreset { pure_sea, clear_ocean, coastal_ocean, turbid_harbour };

struct WaterCoefficients {
    double absorption_per_m;  // a
    double scattering_per_m;  // b
    double extinction_per_m;  // c = a + b
};

// Reference coefficients at 520 nm for the four water purities.
WaterCoefficients water_preset_coefficients(WaterPreset preset);

struct ExtinctionResult {
    double extinction_per_m;      // c = a + b
    double absorption_per_m;      // a
    double scattering_per_m;      // b
    bool outside_validated_band;  // wavelength not in 400-700 nm
};

// Chlorophyll model: a = [a_w + 0.06 a_c C^0.65]*[1 + 0.2 exp(-0.014(l-440))],
// b = 0.3*(550/l)*C^0.62. Wavelength in nm, chlorophyll in mg/m^3,
// coefficients in 1/m. Outside 400-700 nm the result is flagged unreliable.
ExtinctionResult underwater_extinction(double wavelength_nm, double chlorophyll_mg_m3,
                                       double pure_water_absorption_per_m,
                                       double chlorophyll_absorption_per_m);

struct UnderwaterLink {
    double length_m;
    double extinction_per_m;  // from a preset, a measurement, or the model above
};

// Beer's law: T = exp(-c z).
double underwater_transmittance(double extinction_per_m, double length_m);
double underwater_transmittance(const UnderwaterLink& link);

// ------------------------------------------------------- inter-satellite ----

struct InterSatelliteLink {
    double distance_m;
    double receiver_radius_m;   // r_a
    double beam_waist_m;        // w_0
    double wavelength_m = kDefaultWavelengthM;
};

// Gaussian beam radius w(z) = w_0 sqrt(1 + (lambda z / (pi w_0^2))^2).
double beam_radius(double beam_waist_m, double wavelength_m, double distance_m);

// Diffraction-only capture: T = 1 - exp(-2 r_a^2 / w(z)^2).
double intersat_transmittance(const InterSatelliteLink& link);

// ------------------------------------------------------ satellite-ground ----

enum class Direction { downlink, uplink };

// Receiver aperture-averaging parameter for the scintillation index.
//   literal: d = D_r * (pi / (2 L))^2 with L the effective atmosphere in
//            metres; numerically ~0, i.e. a point-like receiver.
//   fresnel: d = sqrt(k D_r^2 / (4 L)), the spherical-wave aperture/Fresnel
//            zone ratio.
enum class ApertureModel { literal, fresnel };

struct OpticsParams {
    double transmitter_diameter_m = 0.3;  // D_t
    double receiver_diameter_m = 1.0;     // D_r
    double transmitter_efficiency = 1.0;  // T_t in (0,1]
    double receiver_efficiency = 1.0;     // T_r in (0,1]
    double pointing_loss = 0.1;           // L_p in [0,1)
    double outage_probability = 1e-3;     // p_thr in (0,1)

    void validate() const;
};

struct Cn2Model {
    bool constant = true;
    double cn2 = 1e-16;        // m^(-2/3), constant mode
    double wind_speed_mps = 21.0;   // profile mode
    double ground_cn2 = 1.7e-14;    // profile mode, A at h = 0

    static Cn2Model constant_value(double cn2);
    static Cn2Model altitude_profile(double wind_speed_mps, double ground_cn2);
};

struct Atmosphere {
    double visibility_km = 200.0;
    Cn2Model cn2;

    static Atmosphere good();  // V = 200 km, Cn2 = 1e-16
    static Atmosphere bad();   // V = 20 km,  Cn2 = 1e-12
    void validate() const;
};

struct SatGroundLink {
    double elevation_deg;
    double zenith_altitude_km;       // L_zen, satellite altitude at zenith
    double ogs_altitude_km = 0.0;    // L_OGS
    Direction direction = Direction::downlink;
    OpticsParams optics;
    Atmosphere atmosphere;
    ApertureModel aperture_model = ApertureModel::literal;

    void validate() const;
};

// Per-source attenuation breakdown, all in dB (positive = loss).
struct LossBudget {
    double geometric_db;
    double scattering_db;          // Mie rate integrated over L_atm_eff
    double scintillation_db;
    double total_db;
    double slant_distance_km;      // L_tot
    double effective_atmosphere_km;  // L_atm_eff
    double rytov_variance;         // sigma_R^2
    double scintillation_index_sq; // sigma_I^2 (after any uplink correction)
    bool far_field;                // geometric-loss validity
};

struct SatGroundResult {
    double transmittance;
    LossBudget budget;
};

// Slant range to the satellite by the law of cosines over the Earth-centre
// triangle. Monotone decreasing in elevation; at zenith equals
// L_zen - L_OGS.
double slant_total_distance(double elevation_deg, double zenith_altitude_km,
                            double ogs_altitude_km);

// Same construction with the 20 km atmosphere shell in place of the orbit.
double effective_atmosphere(double elevation_deg, double ogs_altitude_km);

struct GeometricLoss {
    double loss_db;
    bool far_field;  // L_tot > D_t D_r / lambda
};

// 10 log10( L^2 lambda^2 / (D_t^2 D_r^2) * 1 / (T_t (1 - L_p) T_r) ).
GeometricLoss geometric_loss_db(double total_distance_km, double wavelength_m,
                                const OpticsParams& optics);

// Kruse-Kim Mie scattering rate in dB/km; piecewise size exponent p(V).
double mie_scattering_db_per_km(double visibility_km, double wavelength_nm);

// Empirical altitude profile of the refractive-index structure parameter.
double cn2_profile(double altitude_m, double wind_speed_mps, double ground_cn2);

double cn2_at_altitude(const Cn2Model& model, double altitude_m);

// Rytov variance 2.25 k^(7/6) int_0^L Cn2(z) (L-z)^(5/6) dz along the slant
// path. Constant-Cn2 closed form: 2.25 k^(7/6) Cn2 (6/11) L^(11/6).
double rytov_variance_closed_form(double cn2, double path_length_m, double wavelength_m);

// Adaptive composite Simpson quadrature of the Rytov integral for an
// arbitrary Cn2 along the path; converges to 1e-8 relative or throws.
double rytov_variance_quadrature(const std::function<double(double)>& cn2_of_path_m,
                                 double path_length_m, double wavelength_m);

// Path integral with altitude mapping h(z) = L_OGS + z sin(theta); downlink
// and uplink share the integral (direction enters via the index correction).
double rytov_variance(const Atmosphere& atmosphere, double elevation_deg,
                      double ogs_altitude_km, double wavelength_m);

double aperture_parameter(double receiver_diameter_m, double wavelength_m,
                          double effective_atmosphere_km, ApertureModel model);

// Spherical-wave scintillation index sigma_I^2 from the Rytov variance and
// the receiver aperture parameter.
double scintillation_index(double rytov_variance, double aperture_param);

// Uplink correction on the index (not the squared index).
double uplink_scintillation_index(double downlink_scintillation_index);

// Fade margin against log-normal scintillation at outage probability p_thr:
//   A_sci = 4.343 (erfinv(1 - 2 p_thr) sqrt(2 ln(s+1)) + ln(s+1)/2),  s = sigma_I^2.
// Positive for small p_thr; goes negative for p_thr >~ 0.5 (surfaced in the
// budget, never clamped).
double scintillation_loss_db(double scintillation_index_sq, double outage_probability);

// Composition: A_geo + A_scat/km * L_atm_eff + A_sci, T = 10^(-A_total/10).
SatGroundResult satground_transmittance(const SatGroundLink& link, double wavelength_m);

// Inverse error function (Newton-refined), |y| < 1.
double erf_inv(double y);

// --------------------------------------------------------------- noise ----

enum class ChannelFamily { fibre, underwater, inter_satellite, satellite_ground };

// Catalogued excess-noise sources per link family, for scenario reports and
// documentation of what the excess-noise parameter is standing in for.
std::vector<std::string> excess_noise_sources(ChannelFamily family);

}  // namespace cvqkd::channels
