// Command-line driver: computes SKR sweeps, pass capacities, inter-satellite
// chain plans, and secret-key routes from a scenario file. All outputs are
// deterministic (fixed number formatting, no timestamps, LF endings).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "cvqkd/channels.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/netgraph.hpp"
#include "cvqkd/passes.hpp"
#include "cvqkd/scenario.hpp"
#include "cvqkd/skr.hpp"
#include "cvqkd/textio.hpp"

namespace {

using cvqkd::textio::format_number;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;
constexpr int kExitInfeasible = 4;

struct CommonOpts {
    std::string scenario_path;
    std::string out_path;
    long seed = 0;  // reserved for randomized fixtures; commands are deterministic
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)")->required();
    cmd->add_option("--out", opts.out_path, "Write the CSV artifact here instead of stdout");
    cmd->add_option("--seed", opts.seed, "Seed for randomized fixtures (unused by commands)");
}

// Output sink: --out file or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw cvqkd::validation_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

double transmittance_at(const cvqkd::scenario::Scenario& s, double x) {
    using namespace cvqkd::scenario;
    const auto& spec = *s.channel;
    if (std::holds_alternative<FibreChannel>(spec)) {
        auto link = std::get<FibreChannel>(spec).link;
        link.length_km = x;
        return cvqkd::channels::fibre_transmittance(link);
    }
    if (std::holds_alternative<UnderwaterChannel>(spec)) {
        const auto& ch = std::get<UnderwaterChannel>(spec);
        return cvqkd::channels::underwater_transmittance(ch.extinction_per_m, x);
    }
    if (std::holds_alternative<InterSatelliteChannel>(spec)) {
        const auto& ch = std::get<InterSatelliteChannel>(spec);
        return cvqkd::channels::intersat_transmittance(
            {x, ch.receiver_radius_m, ch.beam_waist_m, s.wavelength_m});
    }
    auto link = std::get<SatGroundChannel>(spec).link;
    link.elevation_deg = x;
    return cvqkd::channels::satground_transmittance(link, s.wavelength_m).transmittance;
}

// Sweep grid value -> the distance/elevation argument in SI-consistent units.
double sweep_argument(const cvqkd::scenario::Scenario& s, double x) {
    using namespace cvqkd::scenario;
    const std::string& var = s.sweep->variable;
    if (std::holds_alternative<UnderwaterChannel>(*s.channel)) {
        return var == "distance_km" ? x * 1e3 : x;  // metres
    }
    if (std::holds_alternative<InterSatelliteChannel>(*s.channel)) {
        return var == "distance_km" ? x * 1e3 : x;  // metres
    }
    if (std::holds_alternative<FibreChannel>(*s.channel)) {
        return var == "distance_m" ? x * 1e-3 : x;  // kilometres
    }
    return x;  // elevation degrees
}

int cmd_skr(const CommonOpts& opts) {
    const auto s = cvqkd::scenario::load_scenario_file(opts.scenario_path);
    if (!s.channel) throw cvqkd::validation_error("scenario: $.channel: required for skr");
    if (!s.sweep) throw cvqkd::validation_error("scenario: $.sweep: required for skr");
    const bool satground =
        std::holds_alternative<cvqkd::scenario::SatGroundChannel>(*s.channel);
    if (satground != (s.sweep->variable == "elevation_deg")) {
        throw cvqkd::validation_error(
            satground ? "scenario: $.sweep.variable: satellite_ground sweeps use elevation_deg"
                      : "scenario: $.sweep.variable: this channel sweeps over distance");
    }

    Sink sink(opts.out_path);
    auto& out = sink.stream();
    out << "x,transmittance,snr_db,beta,fer,skr_bps\n";
    for (double x : s.sweep->grid()) {
        const double t = transmittance_at(s, sweep_argument(s, x));
        const auto r = cvqkd::skr::skr_finite(s.protocol, s.security, t);
        out << format_number(x) << ',' << format_number(t) << ','
            << format_number(r.snr_db) << ',' << format_number(r.beta.value) << ','
            << format_number(r.fer.value) << ',' << format_number(r.skr_bps) << '\n';
    }
    return kExitOk;
}

int cmd_capacity(const CommonOpts& opts) {
    const auto s = cvqkd::scenario::load_scenario_file(opts.scenario_path);
    if (!s.pass) throw cvqkd::validation_error("scenario: $.pass: required for capacity");
    if (!s.channel || !std::holds_alternative<cvqkd::scenario::SatGroundChannel>(*s.channel)) {
        throw cvqkd::validation_error(
            "scenario: $.channel: capacity needs a satellite_ground channel");
    }

    auto profile = cvqkd::passes::load_pass_profile_file(s.pass->file);
    profile.zenith_altitude_km = s.pass->zenith_altitude_km;
    const auto& link = std::get<cvqkd::scenario::SatGroundChannel>(*s.channel).link;
    const auto result = cvqkd::passes::link_capacity_pass(
        profile, link, s.protocol, s.security, s.wavelength_m, s.pass->bin_width_deg);

    Sink sink(opts.out_path);
    auto& out = sink.stream();
    out << "bin_deg,dwell_s,skr_bps,capacity_bits\n";
    for (const auto& b : result.bins) {
        out << format_number(b.bin_center_deg) << ',' << format_number(b.dwell_s) << ','
            << format_number(b.skr_bps) << ',' << format_number(b.capacity_bits) << '\n';
    }
    std::cout << "total_bits,usable_fraction\n"
              << format_number(result.total_bits) << ','
              << format_number(result.usable_fraction) << '\n';
    return kExitOk;
}

int cmd_chain(const CommonOpts& opts) {
    const auto s = cvqkd::scenario::load_scenario_file(opts.scenario_path);
    if (!s.chain) throw cvqkd::validation_error("scenario: $.chain: required for chain");
    const auto& in = *s.chain;
    const auto plan = cvqkd::passes::plan_intersat_chain(
        in.ground_central_angle_deg, in.satellite_altitude_km, in.link_distance_km,
        in.required_capacity_bits, in.intersat_skr_bps);

    Sink sink(opts.out_path);
    auto& out = sink.stream();
    out << "field,value\n"
        << "ground_central_angle_deg," << format_number(plan.ground_central_angle_deg) << '\n'
        << "satellite_altitude_km," << format_number(plan.satellite_altitude_km) << '\n'
        << "link_distance_km," << format_number(plan.link_distance_km) << '\n'
        << "per_link_central_angle_deg," << format_number(plan.per_link_central_angle_deg)
        << '\n'
        << "min_links," << plan.min_links << '\n'
        << "max_links," << plan.max_links << '\n'
        << "min_satellites," << plan.min_satellites << '\n'
        << "max_satellites," << plan.max_satellites << '\n'
        << "min_dwell_s," << format_number(plan.min_dwell_s) << '\n'
        << "min_chord_altitude_km," << format_number(plan.min_chord_altitude_km) << '\n'
        << "valid," << (plan.valid ? "true" : "false") << '\n';
    return kExitOk;
}

int cmd_route(const CommonOpts& opts, const std::vector<std::string>& target_override,
              double key_override) {
    const auto s = cvqkd::scenario::load_scenario_file(opts.scenario_path);
    if (!s.graph) throw cvqkd::validation_error("scenario: $.graph: required for route");
    if (!s.route && target_override.empty()) {
        throw cvqkd::validation_error("scenario: $.route: required for route");
    }

    cvqkd::netgraph::TimeWindow window{0.0, 0.0};
    std::vector<std::string> targets;
    double key_size = 0.0;
    if (s.route) {
        window = s.route->window;
        targets = s.route->targets;
        key_size = s.route->key_size_bits;
    }
    if (!target_override.empty()) targets = target_override;
    if (key_override > 0.0) key_size = key_override;
    if (targets.size() < 2) {
        throw cvqkd::validation_error("route: need at least two targets");
    }
    if (key_size <= 0.0) throw cvqkd::validation_error("route: key size must be > 0");

    const auto snapshot = cvqkd::netgraph::snapshot_capacities(*s.graph, window);
    const auto route = cvqkd::netgraph::multi_target_route(snapshot, targets, key_size);

    if (!route.reachable) {
        std::cout << "reachable,false\n";
        std::cout << "note," << route.note << '\n';
        return kExitInfeasible;
    }

    std::cout << "reachable,true\n";
    std::string joined;
    for (std::size_t i = 0; i < route.combined.nodes.size(); ++i) {
        if (i) joined += "->";
        joined += route.combined.nodes[i];
    }
    std::cout << "route," << joined << '\n'
              << "bottleneck_bits," << format_number(route.combined.bottleneck) << '\n'
              << "condition_no_bottleneck,"
              << (route.feasibility.no_bottleneck ? "true" : "false") << '\n'
              << "condition_fits_key," << (route.feasibility.fits_key ? "true" : "false")
              << '\n'
              << "feasible," << (route.feasibility.feasible ? "true" : "false") << '\n';

    if (!opts.out_path.empty()) {
        Sink sink(opts.out_path);
        auto& out = sink.stream();
        out << "from,to,capacity_bits\n";
        for (std::size_t i = 0; i + 1 < route.combined.nodes.size(); ++i) {
            out << route.combined.nodes[i] << ',' << route.combined.nodes[i + 1] << ','
                << format_number(route.combined.hop_capacities[i]) << '\n';
        }
    }
    return route.feasibility.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVQKD network link-capacity simulator"};
    app.require_subcommand(1);

    CommonOpts skr_opts, cap_opts, chain_opts, route_opts;
    std::vector<std::string> route_targets;
    double route_key = 0.0;

    auto* skr_cmd = app.add_subcommand("skr", "Finite-size SKR sweep over a channel grid");
    add_common(skr_cmd, skr_opts);
    auto* cap_cmd = app.add_subcommand("capacity", "Link capacity over a satellite pass");
    add_common(cap_cmd, cap_opts);
    auto* chain_cmd = app.add_subcommand("chain", "Inter-satellite chain plan");
    add_common(chain_cmd, chain_opts);
    auto* route_cmd = app.add_subcommand("route", "Secret-key route through the network");
    add_common(route_cmd, route_opts);
    route_cmd->add_option("--targets", route_targets,
                          "Ordered target node ids (overrides the scenario)");
    route_cmd->add_option("--key-size", route_key, "Key size in bits (overrides the scenario)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (skr_cmd->parsed()) return cmd_skr(skr_opts);
        if (cap_cmd->parsed()) return cmd_capacity(cap_opts);
        if (chain_cmd->parsed()) return cmd_chain(chain_opts);
        return cmd_route(route_opts, route_targets, route_key);
    } catch (const cvqkd::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cvqkd::computation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}
