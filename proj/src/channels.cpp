#include "cvqkd/channels.hpp"

#include <cmath>
#include <string>

#include "cvqkd/errors.hpp"

namespace cvqkd::channels {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw validation_error(msg);
}

// (L - z)^(5/6) weighting of the turbulence profile along the path.
double rytov_integrand(const std::function<double(double)>& cn2, double z, double path_m) {
    return cn2(z) * std::pow(path_m - z, 5.0 / 6.0);
}

double simpson(const std::function<double(double)>& cn2, double path_m, std::size_t n) {
    const double h = path_m / static_cast<double>(n);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < n; i += 2) odd += rytov_integrand(cn2, i * h, path_m);
    for (std::size_t i = 2; i < n; i += 2) even += rytov_integrand(cn2, i * h, path_m);
    const double ends = rytov_integrand(cn2, 0.0, path_m);  // integrand is 0 at z = L
    return h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

}  // namespace

// ---------------------------------------------------------------- fibre ----

double fibre_transmittance(const FibreLink& link) {
    require(link.length_km >= 0.0, "fibre length must be >= 0");
    require(link.attenuation_db_per_km > 0.0, "fibre attenuation must be > 0");
    return std::pow(10.0, -link.attenuation_db_per_km * link.length_km / 10.0);
}

double combine_transmittances(std::span<const double> attenuation_ratios) {
    double t = 1.0;
    for (double a : attenuation_ratios) {
        require(a >= 1.0, "attenuation ratio must be >= 1");
        t /= a;
    }
    return t;
}

// ----------------------------------------------------------- underwater ----

WaterCoefficients water_preset_coefficients(WaterPreset preset) {
    switch (preset) {
        case WaterPreset::pure_sea: return {0.0405, 0.0025, 0.043};
        case WaterPreset::clear_ocean: return {0.114, 0.037, 0.151};
        case WaterPreset::coastal_ocean: return {0.179, 0.219, 0.398};
        case WaterPreset::turbid_harbour: return {0.366, 1.824, 2.190};
    }
    throw validation_error("unknown water preset");
}

ExtinctionResult underwater_extinction(double wavelength_nm, double chlorophyll_mg_m3,
                                       double pure_water_absorption_per_m,
                                       double chlorophyll_absorption_per_m) {
    require(wavelength_nm > 0.0, "wavelength must be > 0");
    require(chlorophyll_mg_m3 >= 0.0, "chlorophyll concentration must be >= 0");
    require(pure_water_absorption_per_m >= 0.0, "a_w must be >= 0");
    require(chlorophyll_absorption_per_m >= 0.0, "a_c must be >= 0");
    const double c = chlorophyll_mg_m3;
    const double a = (pure_water_absorption_per_m +
                      0.06 * chlorophyll_absorption_per_m * std::pow(c, 0.65)) *
                     (1.0 + 0.2 * std::exp(-0.014 * (wavelength_nm - 440.0)));
    const double b = 0.3 * (550.0 / wavelength_nm) * std::pow(c, 0.62);
    return {a + b, a, b, wavelength_nm < 400.0 || wavelength_nm > 700.0};
}

double underwater_transmittance(double extinction_per_m, double length_m) {
    require(extinction_per_m > 0.0, "extinction coefficient must be > 0");
    require(length_m >= 0.0, "path length must be >= 0");
    return std::exp(-extinction_per_m * length_m);
}

double underwater_transmittance(const UnderwaterLink& link) {
    return underwater_transmittance(link.extinction_per_m, link.length_m);
}

// ------------------------------------------------------- inter-satellite ----

double beam_radius(double beam_waist_m, double wavelength_m, double distance_m) {
    require(beam_waist_m > 0.0, "beam waist must be > 0");
    require(wavelength_m > 0.0, "wavelength must be > 0");
    require(distance_m >= 0.0, "distance must be >= 0");
    const double q = wavelength_m * distance_m / (kPi * beam_waist_m * beam_waist_m);
    return beam_waist_m * std::sqrt(1.0 + q * q);
}

double intersat_transmittance(const InterSatelliteLink& link) {
    require(link.receiver_radius_m > 0.0, "receiver radius must be > 0");
    const double w = beam_radius(link.beam_waist_m, link.wavelength_m, link.distance_m);
    return 1.0 - std::exp(-2.0 * link.receiver_radius_m * link.receiver_radius_m / (w * w));
}

// ------------------------------------------------------ satellite-ground ----

void OpticsParams::validate() const {
    require(transmitter_diameter_m > 0.0, "transmitter diameter must be > 0");
    require(receiver_diameter_m > 0.0, "receiver diameter must be > 0");
    require(transmitter_efficiency > 0.0 && transmitter_efficiency <= 1.0,
            "transmitter efficiency must be in (0,1]");
    require(receiver_efficiency > 0.0 && receiver_efficiency <= 1.0,
            "receiver efficiency must be in (0,1]");
    require(pointing_loss >= 0.0 && pointing_loss < 1.0, "pointing loss must be in [0,1)");
    require(outage_probability > 0.0 && outage_probability < 1.0,
            "outage probability must be in (0,1)");
}

Cn2Model Cn2Model::constant_value(double cn2) {
    Cn2Model m;
    m.constant = true;
    m.cn2 = cn2;
    return m;
}

Cn2Model Cn2Model::altitude_profile(double wind_speed_mps, double ground_cn2) {
    Cn2Model m;
    m.constant = false;
    m.wind_speed_mps = wind_speed_mps;
    m.ground_cn2 = ground_cn2;
    return m;
}

Atmosphere Atmosphere::good() { return {200.0, Cn2Model::constant_value(1e-16)}; }
Atmosphere Atmosphere::bad() { return {20.0, Cn2Model::constant_value(1e-12)}; }

void Atmosphere::validate() const {
    require(visibility_km > 0.0, "visibility must be > 0");
    if (cn2.constant) {
        require(cn2.cn2 > 0.0, "Cn2 must be > 0");
    } else {
        require(cn2.wind_speed_mps >= 0.0, "wind speed must be >= 0");
        require(cn2.ground_cn2 > 0.0, "ground Cn2 must be > 0");
    }
}

void SatGroundLink::validate() const {
    require(elevation_deg > 0.0 && elevation_deg <= 90.0, "elevation must be in (0,90]");
    require(zenith_altitude_km > kAtmosphereThicknessKm,
            "satellite altitude must exceed the atmosphere thickness");
    require(ogs_altitude_km >= 0.0 && ogs_altitude_km < kAtmosphereThicknessKm,
            "OGS altitude must be in [0, atmosphere thickness)");
    optics.validate();
    atmosphere.validate();
}

namespace {

// Law-of-cosines slant range from a ground point at radius r1 to a shell at
// radius r2 seen at the given elevation. Central angle
// alpha = 90deg - theta - arcsin(cos(theta) r1 / r2).
double slant_range_km(double elevation_deg, double shell_altitude_km,
                      double ogs_altitude_km) {
    require(elevation_deg > 0.0 && elevation_deg <= 90.0, "elevation must be in (0,90]");
    require(shell_altitude_km > ogs_altitude_km, "shell must be above the ground point");
    require(ogs_altitude_km >= 0.0, "OGS altitude must be >= 0");
    const double r1 = kEarthRadiusKm + ogs_altitude_km;
    const double r2 = kEarthRadiusKm + shell_altitude_km;
    const double th = deg_to_rad(elevation_deg);
    const double sin_psi = std::cos(th) * r1 / r2;
    if (sin_psi > 1.0) throw validation_error("slant geometry: arcsin argument > 1");
    const double alpha = kPi / 2.0 - th - std::asin(sin_psi);
    return std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(alpha));
}

}  // namespace

double slant_total_distance(double elevation_deg, double zenith_altitude_km,
                            double ogs_altitude_km) {
    return slant_range_km(elevation_deg, zenith_altitude_km, ogs_altitude_km);
}

double effective_atmosphere(double elevation_deg, double ogs_altitude_km) {
    return slant_range_km(elevation_deg, kAtmosphereThicknessKm, ogs_altitude_km);
}

GeometricLoss geometric_loss_db(double total_distance_km, double wavelength_m,
                                const OpticsParams& optics) {
    optics.validate();
    require(total_distance_km > 0.0, "distance must be > 0");
    require(wavelength_m > 0.0, "wavelength must be > 0");
    const double l = total_distance_km * 1e3;
    const double dt = optics.transmitter_diameter_m;
    const double dr = optics.receiver_diameter_m;
    const double ratio = l * l * wavelength_m * wavelength_m / (dt * dt * dr * dr) /
                         (optics.transmitter_efficiency * (1.0 - optics.pointing_loss) *
                          optics.receiver_efficiency);
    return {10.0 * std::log10(ratio), l > dt * dr / wavelength_m};
}

double mie_scattering_db_per_km(double visibility_km, double wavelength_nm) {
    require(visibility_km > 0.0, "visibility must be > 0");
    require(wavelength_nm > 0.0, "wavelength must be > 0");
    const double v = visibility_km;
    double p;
    if (v >= 50.0) p = 1.6;
    else if (v >= 6.0) p = 1.3;
    else if (v >= 1.0) p = 0.16 * v + 0.34;
    else if (v >= 0.5) p = v - 0.5;
    else p = 0.0;
    return 10.0 * std::log10(std::exp(1.0)) * (3.912 / v) *
           std::pow(wavelength_nm / 550.0, -p);
}

double cn2_profile(double altitude_m, double wind_speed_mps, double ground_cn2) {
    require(altitude_m >= 0.0, "altitude must be >= 0");
    const double h = altitude_m;
    const double w = wind_speed_mps;
    return 0.00594 * (w / 27.0) * (w / 27.0) * std::pow(h * 1e-5, 10.0) *
               std::exp(-h / 1000.0) +
           2.7e-16 * std::exp(-h / 1500.0) + ground_cn2 * std::exp(-h / 100.0);
}

double cn2_at_altitude(const Cn2Model& model, double altitude_m) {
    if (model.constant) return model.cn2;
    return cn2_profile(altitude_m, model.wind_speed_mps, model.ground_cn2);
}

double rytov_variance_closed_form(double cn2, double path_length_m, double wavelength_m) {
    require(cn2 >= 0.0, "Cn2 must be >= 0");
    require(path_length_m >= 0.0, "path length must be >= 0");
    const double k = 2.0 * kPi / wavelength_m;
    return 2.25 * std::pow(k, 7.0 / 6.0) * cn2 * (6.0 / 11.0) *
           std::pow(path_length_m, 11.0 / 6.0);
}

double rytov_variance_quadrature(const std::function<double(double)>& cn2_of_path_m,
                                 double path_length_m, double wavelength_m) {
    require(path_length_m >= 0.0, "path length must be >= 0");
    if (path_length_m == 0.0) return 0.0;
    const double k = 2.0 * kPi / wavelength_m;
    const double scale = 2.25 * std::pow(k, 7.0 / 6.0);

    // Composite Simpson with interval doubling until the relative change
    // drops below 1e-8; the integrand's (L-z)^(5/6) endpoint is benign.
    constexpr std::size_t kMaxIntervals = 1u << 20;
    double prev = simpson(cn2_of_path_m, path_length_m, 16);
    for (std::size_t n = 32; n <= kMaxIntervals; n *= 2) {
        const double cur = simpson(cn2_of_path_m, path_length_m, n);
        if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), 1e-300)) {
            return scale * cur;
        }
        prev = cur;
    }
    throw computation_error("rytov quadrature did not converge");
}

double rytov_variance(const Atmosphere& atmosphere, double elevation_deg,
                      double ogs_altitude_km, double wavelength_m) {
    atmosphere.validate();
    const double path_m = effective_atmosphere(elevation_deg, ogs_altitude_km) * 1e3;
    if (atmosphere.cn2.constant) {
        return rytov_variance_closed_form(atmosphere.cn2.cn2, path_m, wavelength_m);
    }
    const double sin_th = std::sin(deg_to_rad(elevation_deg));
    const double h0 = ogs_altitude_km * 1e3;
    const Cn2Model model = atmosphere.cn2;
    return rytov_variance_quadrature(
        [&model, h0, sin_th](double z) { return cn2_at_altitude(model, h0 + z * sin_th); },
        path_m, wavelength_m);
}

double aperture_parameter(double receiver_diameter_m, double wavelength_m,
                          double effective_atmosphere_km, ApertureModel model) {
    require(receiver_diameter_m > 0.0, "receiver diameter must be > 0");
    require(effective_atmosphere_km > 0.0, "effective atmosphere must be > 0");
    const double l = effective_atmosphere_km * 1e3;
    if (model == ApertureModel::literal) {
        const double q = kPi / (2.0 * l);
        return receiver_diameter_m * q * q;
    }
    const double k = 2.0 * kPi / wavelength_m;
    return std::sqrt(k * receiver_diameter_m * receiver_diameter_m / (4.0 * l));
}

double scintillation_index(double rytov_variance, double aperture_param) {
    require(rytov_variance >= 0.0, "Rytov variance must be >= 0");
    if (rytov_variance == 0.0) return 0.0;
    const double s = rytov_variance;
    const double d2 = aperture_param * aperture_param;
    const double s65 = std::pow(s, 6.0 / 5.0);
    const double t1 = 0.20 * s / std::pow(1.0 + 0.18 * d2 + 0.20 * s65, 7.0 / 6.0);
    const double t2 = 0.21 * s * std::pow(1.0 + 0.24 * s65, -5.0 / 6.0) /
                      (1.0 + 0.90 * d2 + 0.21 * d2 * s65);
    return std::exp(t1 + t2) - 1.0;
}

double uplink_scintillation_index(double downlink_scintillation_index) {
    require(downlink_scintillation_index >= 0.0, "scintillation index must be >= 0");
    return downlink_scintillation_index + 0.2;
}

double scintillation_loss_db(double scintillation_index_sq, double outage_probability) {
    require(scintillation_index_sq >= 0.0, "sigma_I^2 must be >= 0");
    require(outage_probability > 0.0 && outage_probability < 1.0,
            "outage probability must be in (0,1)");
    if (scintillation_index_sq == 0.0) return 0.0;
    const double l = std::log(scintillation_index_sq + 1.0);
    return 4.343 * (erf_inv(1.0 - 2.0 * outage_probability) * std::sqrt(2.0 * l) +
                    0.5 * l);
}

SatGroundResult satground_transmittance(const SatGroundLink& link, double wavelength_m) {
    link.validate();
    LossBudget b{};
    b.slant_distance_km =
        slant_total_distance(link.elevation_deg, link.zenith_altitude_km,
                             link.ogs_altitude_km);
    b.effective_atmosphere_km = effective_atmosphere(link.elevation_deg, link.ogs_altitude_km);

    const auto geo = geometric_loss_db(b.slant_distance_km, wavelength_m, link.optics);
    b.geometric_db = geo.loss_db;
    b.far_field = geo.far_field;

    b.scattering_db = mie_scattering_db_per_km(link.atmosphere.visibility_km,
                                               wavelength_m * 1e9) *
                      b.effective_atmosphere_km;

    b.rytov_variance = rytov_variance(link.atmosphere, link.elevation_deg,
                                      link.ogs_altitude_km, wavelength_m);
    const double d = aperture_parameter(link.optics.receiver_diameter_m, wavelength_m,
                                        b.effective_atmosphere_km, link.aperture_model);
    double si2 = scintillation_index(b.rytov_variance, d);
    if (link.direction == Direction::uplink) {
        const double si = uplink_scintillation_index(std::sqrt(si2));
        si2 = si * si;
    }
    b.scintillation_index_sq = si2;
    b.scintillation_db = scintillation_loss_db(si2, link.optics.outage_probability);

    b.total_db = b.geometric_db + b.scattering_db + b.scintillation_db;
    return {std::pow(10.0, -b.total_db / 10.0), b};
}

std::vector<std::string> excess_noise_sources(ChannelFamily family) {
    switch (family) {
        case ChannelFamily::fibre:
            return {"vibrations", "heat"};
        case ChannelFamily::underwater:
            return {"precipitates", "small organisms", "heat currents"};
        case ChannelFamily::inter_satellite:
            return {"radiation"};
        case ChannelFamily::satellite_ground:
            return {"atmospheric aerosols", "atmospheric turbulence"};
    }
    throw validation_error("unknown channel family");
}

double erf_inv(double y) {
    require(y > -1.0 && y < 1.0, "erf_inv argument must be in (-1,1)");
    if (y == 0.0) return 0.0;

    // Initial guess from the central/tail rational approximations, then
    // Newton steps on erf(x) - y with the exact Gaussian derivative.
    double x;
    const double a = std::abs(y);
    if (a <= 0.7) {
        const double z = y * y;
        x = y * (((-0.140543331 * z + 0.914624893) * z - 1.645349621) * z + 0.886226899) /
            ((((0.012229801 * z - 0.329097515) * z + 1.442710462) * z - 2.118377725) * z +
             1.0);
    } else {
        double z = std::sqrt(-std::log((1.0 - a) / 2.0));
        x = (((1.641345311 * z + 3.429567803) * z - 1.624906493) * z - 1.970840454) /
            ((1.637067800 * z + 3.543889200) * z + 1.0);
        x = std::copysign(x, y);
    }
    for (int i = 0; i < 4; ++i) {
        const double err = std::erf(x) - y;
        x -= err * std::sqrt(kPi) / 2.0 * std::exp(x * x);
    }
    return x;
}

}  // namespace cvqkd::channels
