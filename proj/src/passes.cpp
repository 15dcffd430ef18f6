#include "cvqkd/passes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "cvqkd/errors.hpp"

namespace cvqkd::passes {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw validation_error(msg);
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line,
                             const std::string& what) {
    throw validation_error(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

double PassProfile::duration_s() const {
    return samples.empty() ? 0.0 : samples.back().time_s - samples.front().time_s;
}

void PassProfile::validate() const {
    require(samples.size() >= 2, "pass profile needs at least two samples");
    require(zenith_altitude_km > kAtmosphereThicknessKm,
            "satellite altitude must exceed the atmosphere thickness");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        require(s.elevation_deg > 0.0 && s.elevation_deg <= 90.0,
                "elevation out of (0,90] at sample " + std::to_string(i));
        if (i > 0) {
            require(s.time_s > samples[i - 1].time_s,
                    "non-increasing time at sample " + std::to_string(i));
        }
    }
}

double ElevationHistogram::total_dwell_s() const {
    double t = 0.0;
    for (const auto& b : bins) t += b.dwell_s;
    return t;
}

PassProfile load_pass_profile(std::istream& in, const std::string& source_name) {
    PassProfile profile;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) parse_fail(source_name, 1, "empty pass file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time_s,elevation_deg") {
        parse_fail(source_name, lineno, "expected header 'time_s,elevation_deg'");
    }

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) parse_fail(source_name, lineno, "missing comma");
        double t, e;
        try {
            std::size_t used = 0;
            t = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing junk");
            const std::string rest = line.substr(comma + 1);
            e = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            parse_fail(source_name, lineno, "malformed number");
        }
        if (!(e > 0.0 && e <= 90.0)) {
            parse_fail(source_name, lineno, "elevation out of (0,90]");
        }
        if (!profile.samples.empty() && t <= profile.samples.back().time_s) {
            parse_fail(source_name, lineno, "time must be strictly increasing");
        }
        profile.samples.push_back({t, e});
    }
    if (profile.samples.size() < 2) {
        parse_fail(source_name, lineno, "pass profile needs at least two samples");
    }
    return profile;
}

PassProfile load_pass_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open pass file: " + path);
    return load_pass_profile(in, path);
}

ElevationHistogram discretize_pass(const PassProfile& profile, double bin_width_deg) {
    profile.validate();
    require(bin_width_deg > 0.0, "bin width must be > 0");

    std::map<long, double> dwell;
    for (std::size_t i = 0; i + 1 < profile.samples.size(); ++i) {
        const auto& a = profile.samples[i];
        const auto& b = profile.samples[i + 1];
        const double mid = 0.5 * (a.elevation_deg + b.elevation_deg);
        const long bin = static_cast<long>(std::floor(mid / bin_width_deg));
        dwell[bin] += b.time_s - a.time_s;
    }

    ElevationHistogram hist{bin_width_deg, {}};
    hist.bins.reserve(dwell.size());
    for (const auto& [bin, t] : dwell) {
        hist.bins.push_back({bin * bin_width_deg, t});
    }
    return hist;
}

double link_capacity_static(double skr_bps, double duration_s) {
    require(duration_s >= 0.0, "duration must be >= 0");
    return skr_bps > 0.0 ? skr_bps * duration_s : 0.0;
}

CapacityResult link_capacity_pass(const PassProfile& profile,
                                  const channels::SatGroundLink& link_template,
                                  const skr::ProtocolParams& proto,
                                  const skr::SecurityParams& sec, double wavelength_m,
                                  double bin_width_deg) {
    const auto hist = discretize_pass(profile, bin_width_deg);

    CapacityResult result{};
    double usable_s = 0.0;
    for (const auto& bin : hist.bins) {
        channels::SatGroundLink link = link_template;
        link.zenith_altitude_km = profile.zenith_altitude_km;
        link.elevation_deg = std::min(bin.lower_deg + 0.5 * bin_width_deg, 90.0);
        const auto chan = channels::satground_transmittance(link, wavelength_m);
        const auto skr = skr::skr_finite(proto, sec, chan.transmittance);
        const double cap = link_capacity_static(skr.skr_bps, bin.dwell_s);
        if (skr.skr_bps > 0.0) usable_s += bin.dwell_s;
        result.bins.push_back({link.elevation_deg, bin.dwell_s, skr.skr_bps, cap});
        result.total_bits += cap;
    }
    const double duration = profile.duration_s();
    result.usable_fraction = duration > 0.0 ? usable_s / duration : 0.0;
    return result;
}

FeasibilityVerdict check_relay_feasibility(std::span<const double> capacities_bits,
                                           double key_size_bits) {
    require(!capacities_bits.empty(), "need at least one link capacity");
    require(key_size_bits > 0.0, "key size must be > 0");

    FeasibilityVerdict v{true, true, false, {}, {}};
    const double first = capacities_bits.front();
    for (std::size_t i = 1; i < capacities_bits.size(); ++i) {
        if (!(capacities_bits[i] > first)) {
            v.no_bottleneck = false;
            v.bottleneck_violations.push_back(i);
        }
    }
    for (std::size_t i = 0; i < capacities_bits.size(); ++i) {
        if (!(capacities_bits[i] > key_size_bits)) {
            v.fits_key = false;
            v.key_violations.push_back(i);
        }
    }
    v.feasible = v.no_bottleneck && v.fits_key;
    return v;
}

double chain_central_angle(double link_distance_km, double satellite_altitude_km) {
    require(link_distance_km >= 0.0, "link distance must be >= 0");
    require(satellite_altitude_km > 0.0, "satellite altitude must be > 0");
    const double r = kEarthRadiusKm + satellite_altitude_km;
    if (link_distance_km > 2.0 * r) {
        throw validation_error("chord longer than the orbit diameter");
    }
    return rad_to_deg(2.0 * std::asin(link_distance_km / (2.0 * r)));
}

double chain_min_altitude(double central_angle_deg, double satellite_altitude_km) {
    require(central_angle_deg >= 0.0 && central_angle_deg < 180.0,
            "central angle must be in [0,180)");
    const double r = kEarthRadiusKm + satellite_altitude_km;
    return r * std::cos(deg_to_rad(central_angle_deg / 2.0)) - kEarthRadiusKm;
}

ChainPlan plan_intersat_chain(double ground_central_angle_deg, double satellite_altitude_km,
                              double link_distance_km, double required_capacity_bits,
                              double intersat_skr_bps) {
    require(ground_central_angle_deg > 0.0 && ground_central_angle_deg <= 180.0,
            "ground central angle must be in (0,180]");
    require(required_capacity_bits >= 0.0, "required capacity must be >= 0");
    require(intersat_skr_bps > 0.0, "inter-satellite SKR must be > 0");

    ChainPlan plan{};
    plan.ground_central_angle_deg = ground_central_angle_deg;
    plan.satellite_altitude_km = satellite_altitude_km;
    plan.link_distance_km = link_distance_km;
    plan.per_link_central_angle_deg =
        chain_central_angle(link_distance_km, satellite_altitude_km);
    require(plan.per_link_central_angle_deg > 0.0, "link distance must be > 0");

    const double ratio = ground_central_angle_deg / plan.per_link_central_angle_deg;
    plan.min_links = static_cast<int>(std::floor(ratio));
    plan.max_links = static_cast<int>(std::ceil(ratio));
    plan.min_satellites = plan.min_links + 1;
    plan.max_satellites = plan.max_links + 1;
    plan.min_dwell_s = required_capacity_bits / intersat_skr_bps;
    plan.min_chord_altitude_km =
        chain_min_altitude(plan.per_link_central_angle_deg, satellite_altitude_km);
    plan.valid = plan.min_chord_altitude_km >= kMinChainAltitudeKm;
    return plan;
}

double ground_central_angle(double lat1_deg, double lon1_deg, double lat2_deg,
                            double lon2_deg) {
    require(lat1_deg >= -90.0 && lat1_deg <= 90.0, "latitude out of range");
    require(lat2_deg >= -90.0 && lat2_deg <= 90.0, "latitude out of range");
    // Haversine: well conditioned at both coincident and antipodal points.
    const double p1 = deg_to_rad(lat1_deg);
    const double p2 = deg_to_rad(lat2_deg);
    const double sp = std::sin(deg_to_rad(lat2_deg - lat1_deg) / 2.0);
    const double sl = std::sin(deg_to_rad(lon2_deg - lon1_deg) / 2.0);
    const double h = sp * sp + std::cos(p1) * std::cos(p2) * sl * sl;
    return rad_to_deg(2.0 * std::asin(std::min(1.0, std::sqrt(h))));
}

}  // namespace cvqkd::passes
