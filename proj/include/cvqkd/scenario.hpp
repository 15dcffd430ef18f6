#pragma once

// Scenario files: one JSON document describing protocol, security, channel,
// sweep/pass/chain/route inputs for the command-line tools. Presets
// "good_atmosphere"/"bad_atmosphere" and "table5_<water type>" are fixed here.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvqkd/channels.hpp"
#include "cvqkd/netgraph.hpp"
#include "cvqkd/skr.hpp"

namespace cvqkd::scenario {

struct FibreChannel {
    channels::FibreLink link;
};

struct UnderwaterChannel {
    double extinction_per_m;
    bool outside_validated_band = false;
};

struct InterSatelliteChannel {
    double receiver_radius_m;
    double beam_waist_m;
};

struct SatGroundChannel {
    channels::SatGroundLink link;  // elevation filled per grid point
};

using ChannelSpec =
    std::variant<FibreChannel, UnderwaterChannel, InterSatelliteChannel, SatGroundChannel>;

struct Sweep {
    std::string variable;  // distance_km | distance_m | elevation_deg
    double start;
    double stop;
    double step;

    std::vector<double> grid() const;
};

struct PassInput {
    std::string file;
    double bin_width_deg = 1.0;
    double zenith_altitude_km = 408.0;
};

struct ChainInput {
    double ground_central_angle_deg;
    double satellite_altitude_km = 408.0;
    double link_distance_km = 1000.0;
    double required_capacity_bits;
    double intersat_skr_bps;
};

struct RouteInput {
    netgraph::TimeWindow window{0.0, 0.0};
    std::vector<std::string> targets;
    double key_size_bits;
};

struct Scenario {
    skr::ProtocolParams protocol;
    skr::SecurityParams security;
    double wavelength_m = kDefaultWavelengthM;
    std::optional<ChannelSpec> channel;
    std::optional<Sweep> sweep;
    std::optional<PassInput> pass;
    std::optional<ChainInput> chain;
    std::optional<netgraph::NetworkGraph> graph;
    std::optional<RouteInput> route;
};

// Parses and validates; throws validation_error with a JSON field path on
// schema violations. Relative file references resolve against the scenario
// file's directory.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir);

channels::Atmosphere atmosphere_preset(const std::string& name);
channels::WaterPreset water_preset(const std::string& name);

}  // namespace cvqkd::scenario
