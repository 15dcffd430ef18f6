#pragma once

// Satellite pass profiles, elevation-binned link capacities, relay
// feasibility, and inter-satellite chain planning.

#include <iosfwd>
#include <string>
#include <vector>

#include "cvqkd/channels.hpp"
#include "cvqkd/skr.hpp"

namespace cvqkd::passes {

struct PassSample {
    double time_s;
    double elevation_deg;
};

struct PassProfile {
    std::vector<PassSample> samples;  // strictly increasing time
    double zenith_altitude_km = 408.0;
    std::string ground_node_id;

    double duration_s() const;
    void validate() const;
};

struct ElevationBin {
    double lower_deg;   // bin covers [lower, lower + width)
    double dwell_s;
};

struct ElevationHistogram {
    double bin_width_deg;
    std::vector<ElevationBin> bins;  // ascending, zero-dwell bins omitted

    double total_dwell_s() const;
};

struct BinCapacity {
    double bin_center_deg;
    double dwell_s;
    double skr_bps;
    double capacity_bits;  // 0 when the SKR is not positive
};

struct CapacityResult {
    std::vector<BinCapacity> bins;
    double total_bits;
    double usable_fraction;  // dwell with positive SKR over pass duration
};

struct FeasibilityVerdict {
    bool no_bottleneck;           // every later capacity > first capacity
    bool fits_key;                // every capacity > key size
    bool feasible;                // both
    std::vector<std::size_t> bottleneck_violations;  // indices failing cond. 1
    std::vector<std::size_t> key_violations;         // indices failing cond. 2
};

struct ChainPlan {
    double ground_central_angle_deg;
    double satellite_altitude_km;
    double link_distance_km;
    double per_link_central_angle_deg;  // phi
    int min_links;
    int max_links;
    int min_satellites;
    int max_satellites;
    double min_dwell_s;           // time to move the required capacity
    double min_chord_altitude_km;  // lowest point of a link chord
    bool valid;                   // chord stays above the atmosphere
};

// Parses `time_s,elevation_deg` CSV (header required). Throws
// validation_error with the offending line number on malformed input,
// non-monotone time, or elevation outside (0, 90].
PassProfile load_pass_profile(std::istream& in, const std::string& source_name = "<stream>");
PassProfile load_pass_profile_file(const std::string& path);

// Attributes each sample interval's duration to the bin containing its
// midpoint elevation.
ElevationHistogram discretize_pass(const PassProfile& profile, double bin_width_deg = 1.0);

// C = SKR * t for a usable (positive-SKR) link; zero otherwise.
double link_capacity_static(double skr_bps, double duration_s);

// Per-bin finite-size SKR at the bin-centre elevation; only positive-SKR
// bins contribute capacity.
CapacityResult link_capacity_pass(const PassProfile& profile,
                                  const channels::SatGroundLink& link_template,
                                  const skr::ProtocolParams& proto,
                                  const skr::SecurityParams& sec,
                                  double wavelength_m = kDefaultWavelengthM,
                                  double bin_width_deg = 1.0);

// Multi-hop relay conditions: (1) every subsequent link capacity strictly
// exceeds the first link's, (2) every capacity strictly exceeds the key size.
FeasibilityVerdict check_relay_feasibility(std::span<const double> capacities_bits,
                                           double key_size_bits);

// Central angle subtended by a chord of length L between satellites at
// altitude h: phi = 2 asin(L / (2 (R_E + h))).
double chain_central_angle(double link_distance_km, double satellite_altitude_km);

// Altitude of the chord midpoint: (R_E + h) cos(phi/2) - R_E.
double chain_min_altitude(double central_angle_deg, double satellite_altitude_km);

ChainPlan plan_intersat_chain(double ground_central_angle_deg, double satellite_altitude_km,
                              double link_distance_km, double required_capacity_bits,
                              double intersat_skr_bps);

// Great-circle central angle between two ground points, degrees in [0, 180].
double ground_central_angle(double lat1_deg, double lon1_deg, double lat2_deg,
                            double lon2_deg);

}  // namespace cvqkd::passes
