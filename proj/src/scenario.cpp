#include "cvqkd/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cvqkd/errors.hpp"
#include "cvqkd/passes.hpp"

namespace cvqkd::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw validation_error("scenario: " + path + ": " + what);
}

// Field-path aware accessors so schema errors point at the offending key.
class Ctx {
public:
    Ctx(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& get(const std::string& key) {
        const json* v = find(key);
        if (!v) fail(path_ + "." + key, "missing required field");
        return *v;
    }

    double number(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) fail(path_ + "." + key, "expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(path_ + "." + key, "expected a number");
        return v->get<double>();
    }

    int integer(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
        return v.get<int>();
    }

    std::string text(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) fail(path_ + "." + key, "expected a string");
        return v.get<std::string>();
    }

    std::string text_or(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(path_ + "." + key, "expected a string");
        return v->get<std::string>();
    }

    bool boolean_or(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(path_ + "." + key, "expected a boolean");
        return v->get<bool>();
    }

    void reject_unknown() {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.count(key)) fail(path_ + "." + key, "unknown field");
        }
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

skr::ProtocolParams parse_protocol(const json& j, const std::string& path) {
    Ctx c(j, path);
    skr::ProtocolParams p;
    p.modulation_variance_snu = c.number_or("modulation_variance_snu", 5.0);
    p.excess_noise_snu = c.number_or("excess_noise_snu", 0.03);
    p.repetition_rate_hz = c.number_or("repetition_rate_hz", kDefaultRepetitionRateHz);

    const std::string det = c.text_or("detection", "heterodyne");
    if (det == "heterodyne") p.detection = skr::Detection::heterodyne;
    else if (det == "homodyne") p.detection = skr::Detection::homodyne;
    else fail(path + ".detection", "expected 'heterodyne' or 'homodyne'");

    const std::string rec = c.text_or("reconciliation", "MD");
    if (rec == "MD") p.reconciliation = skr::Reconciliation::md;
    else if (rec == "MLC-MSD") p.reconciliation = skr::Reconciliation::mlc_msd;
    else fail(path + ".reconciliation", "expected 'MD' or 'MLC-MSD'");

    if (const json* b = c.find("beta")) {
        if (b->is_string() && b->get<std::string>() == "empirical") {
            p.beta = skr::BetaMode::empirical_fit();
        } else if (b->is_number()) {
            p.beta = skr::BetaMode::fixed(b->get<double>());
        } else {
            fail(path + ".beta", "expected 'empirical' or a number in [0,1]");
        }
    }
    c.reject_unknown();
    try {
        p.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return p;
}

skr::SecurityParams parse_security(const json& j, const std::string& path) {
    Ctx c(j, path);
    skr::SecurityParams s;
    if (c.find("discretisation")) s.discretisation = c.integer("discretisation");
    s.smoothing_eps = c.number_or("smoothing_epsilon", s.smoothing_eps);
    s.security_eps = c.number_or("security_epsilon", s.security_eps);
    s.block_size = c.number_or("block_size", s.block_size);
    if (c.find("estimation_fraction")) {
        s.estimation_fraction = c.number("estimation_fraction");
    }
    c.reject_unknown();
    try {
        s.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return s;
}

channels::OpticsParams parse_optics(const json& j, const std::string& path) {
    Ctx c(j, path);
    channels::OpticsParams o;
    o.transmitter_diameter_m = c.number_or("transmitter_diameter_m", o.transmitter_diameter_m);
    o.receiver_diameter_m = c.number_or("receiver_diameter_m", o.receiver_diameter_m);
    o.transmitter_efficiency = c.number_or("transmitter_efficiency", o.transmitter_efficiency);
    o.receiver_efficiency = c.number_or("receiver_efficiency", o.receiver_efficiency);
    o.pointing_loss = c.number_or("pointing_loss", o.pointing_loss);
    o.outage_probability = c.number_or("outage_probability", o.outage_probability);
    c.reject_unknown();
    try {
        o.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return o;
}

channels::Atmosphere parse_atmosphere(const json& j, const std::string& path) {
    if (j.is_string()) return atmosphere_preset(j.get<std::string>());
    Ctx c(j, path);
    channels::Atmosphere a;
    a.visibility_km = c.number_or("visibility_km", a.visibility_km);
    if (const json* cn2 = c.find("cn2")) {
        if (cn2->is_number()) {
            a.cn2 = channels::Cn2Model::constant_value(cn2->get<double>());
        } else {
            Ctx cc(*cn2, path + ".cn2");
            a.cn2 = channels::Cn2Model::altitude_profile(cc.number("wind_speed_mps"),
                                                         cc.number("ground_cn2"));
            cc.reject_unknown();
        }
    }
    c.reject_unknown();
    try {
        a.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return a;
}

channels::ApertureModel parse_aperture_model(const std::string& name,
                                             const std::string& path) {
    if (name == "literal") return channels::ApertureModel::literal;
    if (name == "fresnel") return channels::ApertureModel::fresnel;
    fail(path, "expected 'literal' or 'fresnel'");
}

channels::SatGroundLink parse_satground(Ctx& c, const std::string& path) {
    channels::SatGroundLink link;
    link.elevation_deg = c.number_or("elevation_deg", 90.0);
    link.zenith_altitude_km = c.number_or("zenith_altitude_km", 408.0);
    link.ogs_altitude_km = c.number_or("ogs_altitude_km", 0.0);
    const std::string dir = c.text_or("direction", "downlink");
    if (dir == "downlink") link.direction = channels::Direction::downlink;
    else if (dir == "uplink") link.direction = channels::Direction::uplink;
    else fail(path + ".direction", "expected 'downlink' or 'uplink'");
    if (const json* o = c.find("optics")) link.optics = parse_optics(*o, path + ".optics");
    if (const json* a = c.find("atmosphere")) {
        link.atmosphere = parse_atmosphere(*a, path + ".atmosphere");
    }
    link.aperture_model = parse_aperture_model(c.text_or("aperture_model", "literal"),
                                               path + ".aperture_model");
    try {
        link.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return link;
}

ChannelSpec parse_channel(const json& j, const std::string& path) {
    Ctx c(j, path);
    const std::string type = c.text("type");
    if (type == "fibre") {
        FibreChannel ch;
        ch.link.length_km = c.number_or("length_km", 0.0);
        ch.link.attenuation_db_per_km =
            c.number_or("attenuation_db_per_km", ch.link.attenuation_db_per_km);
        c.reject_unknown();
        return ch;
    }
    if (type == "underwater") {
        UnderwaterChannel ch{};
        const json& w = c.get("water");
        if (w.is_string()) {
            ch.extinction_per_m =
                channels::water_preset_coefficients(water_preset(w.get<std::string>()))
                    .extinction_per_m;
        } else {
            Ctx wc(w, path + ".water");
            if (wc.find("extinction_per_m")) {
                ch.extinction_per_m = wc.number("extinction_per_m");
            } else {
                const auto ext = channels::underwater_extinction(
                    wc.number("wavelength_nm"), wc.number("chlorophyll_mg_m3"),
                    wc.number("pure_water_absorption_per_m"),
                    wc.number("chlorophyll_absorption_per_m"));
                ch.extinction_per_m = ext.extinction_per_m;
                ch.outside_validated_band = ext.outside_validated_band;
            }
            wc.reject_unknown();
        }
        if (ch.extinction_per_m <= 0.0) fail(path + ".water", "extinction must be > 0");
        c.reject_unknown();
        return ch;
    }
    if (type == "inter_satellite") {
        InterSatelliteChannel ch{};
        ch.receiver_radius_m = c.number("receiver_radius_m");
        ch.beam_waist_m = c.number("beam_waist_m");
        if (ch.receiver_radius_m <= 0.0 || ch.beam_waist_m <= 0.0) {
            fail(path, "apertures must be > 0");
        }
        c.reject_unknown();
        return ch;
    }
    if (type == "satellite_ground") {
        SatGroundChannel ch{parse_satground(c, path)};
        c.reject_unknown();
        return ch;
    }
    fail(path + ".type",
         "expected 'fibre', 'underwater', 'inter_satellite' or 'satellite_ground'");
}

Sweep parse_sweep(const json& j, const std::string& path) {
    Ctx c(j, path);
    Sweep s;
    s.variable = c.text("variable");
    if (s.variable != "distance_km" && s.variable != "distance_m" &&
        s.variable != "elevation_deg") {
        fail(path + ".variable", "expected 'distance_km', 'distance_m' or 'elevation_deg'");
    }
    s.start = c.number("start");
    s.stop = c.number("stop");
    s.step = c.number("step");
    if (s.step <= 0.0) fail(path + ".step", "step must be > 0");
    c.reject_unknown();
    return s;
}

netgraph::CapacityData parse_capacity(const json& j, const std::string& path,
                                      const std::string& base_dir,
                                      const skr::ProtocolParams& proto,
                                      const skr::SecurityParams& sec, double wavelength_m) {
    Ctx c(j, path);
    netgraph::CapacityData cap;
    if (const json* s = c.find("static_bits")) {
        cap.is_static = true;
        cap.static_bits = s->get<double>();
        c.reject_unknown();
        return cap;
    }
    cap.is_static = false;
    if (const json* wins = c.find("windows")) {
        if (!wins->is_array()) fail(path + ".windows", "expected an array");
        for (std::size_t i = 0; i < wins->size(); ++i) {
            Ctx wc((*wins)[i], path + ".windows[" + std::to_string(i) + "]");
            netgraph::CapacityWindow w{wc.number("start_s"), wc.number("end_s"),
                                       wc.number("bits")};
            if (w.end_s <= w.start_s) {
                fail(path + ".windows[" + std::to_string(i) + "]", "end_s must exceed start_s");
            }
            wc.reject_unknown();
            cap.windows.push_back(w);
        }
    } else if (c.find("pass_file")) {
        const std::string file = c.text("pass_file");
        const auto resolved = std::filesystem::path(base_dir) / file;
        auto profile = passes::load_pass_profile_file(resolved.string());
        channels::SatGroundLink link = parse_satground(c, path);
        profile.zenith_altitude_km = link.zenith_altitude_km;
        const auto result = passes::link_capacity_pass(profile, link, proto, sec, wavelength_m);
        cap.windows.push_back({profile.samples.front().time_s, profile.samples.back().time_s,
                               result.total_bits});
    } else {
        fail(path, "expected 'static_bits', 'windows' or 'pass_file'");
    }
    if (const json* cov = c.find("coverage")) {
        if (!cov->is_array() || cov->size() != 2) {
            fail(path + ".coverage", "expected [start_s, end_s]");
        }
        cap.coverage_start_s = (*cov)[0].get<double>();
        cap.coverage_end_s = (*cov)[1].get<double>();
    }
    c.reject_unknown();
    return cap;
}

netgraph::NodeKind parse_kind(const std::string& name, const std::string& path) {
    if (name == "ogs") return netgraph::NodeKind::ogs;
    if (name == "satellite") return netgraph::NodeKind::satellite;
    if (name == "submarine") return netgraph::NodeKind::submarine;
    if (name == "hap") return netgraph::NodeKind::hap;
    fail(path, "expected 'ogs', 'satellite', 'submarine' or 'hap'");
}

netgraph::LinkFamily parse_family(const std::string& name, const std::string& path) {
    if (name == "fibre") return netgraph::LinkFamily::fibre;
    if (name == "satellite_ground") return netgraph::LinkFamily::satellite_ground;
    if (name == "submarine_ground") return netgraph::LinkFamily::submarine_ground;
    if (name == "satellite_submarine") return netgraph::LinkFamily::satellite_submarine;
    if (name == "inter_satellite") return netgraph::LinkFamily::inter_satellite;
    if (name == "inter_submarine") return netgraph::LinkFamily::inter_submarine;
    fail(path, "unknown link family");
}

netgraph::NetworkGraph parse_graph(const json& j, const std::string& path,
                                   const std::string& base_dir,
                                   const skr::ProtocolParams& proto,
                                   const skr::SecurityParams& sec, double wavelength_m) {
    Ctx c(j, path);
    netgraph::NetworkGraph g;

    const json& nodes = c.get("nodes");
    if (!nodes.is_array()) fail(path + ".nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string npath = path + ".nodes[" + std::to_string(i) + "]";
        Ctx nc(nodes[i], npath);
        netgraph::Node n;
        n.id = nc.text("id");
        n.kind = parse_kind(nc.text("kind"), npath + ".kind");
        n.trusted = nc.boolean_or("trusted", true);
        if (const json* pos = nc.find("position")) {
            Ctx pc(*pos, npath + ".position");
            n.fixed_position = netgraph::TrajectorySample{
                0.0, pc.number("lat_deg"), pc.number("lon_deg"), pc.number_or("alt_km", 0.0)};
            pc.reject_unknown();
        }
        if (const json* traj = nc.find("trajectory")) {
            if (!traj->is_array()) fail(npath + ".trajectory", "expected an array");
            for (std::size_t k = 0; k < traj->size(); ++k) {
                Ctx tc((*traj)[k], npath + ".trajectory[" + std::to_string(k) + "]");
                n.trajectory.push_back({tc.number("time_s"), tc.number("lat_deg"),
                                        tc.number("lon_deg"), tc.number_or("alt_km", 0.0)});
                tc.reject_unknown();
            }
        }
        if (n.moving() && !n.fixed_position && n.trajectory.empty()) {
            fail(npath, "moving node needs a position or trajectory samples");
        }
        nc.reject_unknown();
        g.nodes.push_back(std::move(n));
    }

    const json& links = c.get("links");
    if (!links.is_array()) fail(path + ".links", "expected an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string lpath = path + ".links[" + std::to_string(i) + "]";
        Ctx lc(links[i], lpath);
        netgraph::Link l;
        l.id = lc.text_or("id", "link" + std::to_string(i));
        l.node_a = lc.text("a");
        l.node_b = lc.text("b");
        l.family = parse_family(lc.text("family"), lpath + ".family");
        const netgraph::Node* a = g.find_node(l.node_a);
        const netgraph::Node* b = g.find_node(l.node_b);
        if (!a) fail(lpath + ".a", "unknown node id: " + l.node_a);
        if (!b) fail(lpath + ".b", "unknown node id: " + l.node_b);
        const bool station_kept = lc.boolean_or("station_kept", false);
        try {
            l.classification = netgraph::classify_link(a->kind, b->kind, l.family, station_kept);
        } catch (const validation_error& e) {
            fail(lpath, e.what());
        }
        if (const json* cap = lc.find("capacity")) {
            l.capacity_ab =
                parse_capacity(*cap, lpath + ".capacity", base_dir, proto, sec, wavelength_m);
            l.capacity_ba = l.capacity_ab;
        }
        if (const json* cap = lc.find("capacity_ab")) {
            l.capacity_ab = parse_capacity(*cap, lpath + ".capacity_ab", base_dir, proto, sec,
                                           wavelength_m);
        }
        if (const json* cap = lc.find("capacity_ba")) {
            l.capacity_ba = parse_capacity(*cap, lpath + ".capacity_ba", base_dir, proto, sec,
                                           wavelength_m);
        }
        lc.reject_unknown();
        g.links.push_back(std::move(l));
    }
    c.reject_unknown();
    try {
        g.validate();
    } catch (const validation_error& e) {
        fail(path, e.what());
    }
    return g;
}

}  // namespace

std::vector<double> Sweep::grid() const {
    std::vector<double> xs;
    if (stop < start) return xs;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    xs.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) xs.push_back(start + static_cast<double>(i) * step);
    return xs;
}

channels::Atmosphere atmosphere_preset(const std::string& name) {
    if (name == "good_atmosphere") return channels::Atmosphere::good();
    if (name == "bad_atmosphere") return channels::Atmosphere::bad();
    throw validation_error("unknown atmosphere preset: " + name);
}

channels::WaterPreset water_preset(const std::string& name) {
    if (name == "table5_pure_sea_water") return channels::WaterPreset::pure_sea;
    if (name == "table5_clear_ocean_water") return channels::WaterPreset::clear_ocean;
    if (name == "table5_coastal_ocean_water") return channels::WaterPreset::coastal_ocean;
    if (name == "table5_turbid_harbour_water") return channels::WaterPreset::turbid_harbour;
    throw validation_error("unknown water preset: " + name);
}

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    Ctx c(j, "$");
    Scenario s;
    if (const json* p = c.find("protocol")) s.protocol = parse_protocol(*p, "$.protocol");
    if (const json* p = c.find("security")) s.security = parse_security(*p, "$.security");
    s.wavelength_m = c.number_or("wavelength_nm", 1550.0) * 1e-9;
    if (s.wavelength_m <= 0.0) fail("$.wavelength_nm", "wavelength must be > 0");
    if (const json* p = c.find("channel")) s.channel = parse_channel(*p, "$.channel");
    if (const json* p = c.find("sweep")) s.sweep = parse_sweep(*p, "$.sweep");
    if (const json* p = c.find("pass")) {
        Ctx pc(*p, "$.pass");
        PassInput in;
        in.file = (std::filesystem::path(base_dir) / pc.text("file")).string();
        in.bin_width_deg = pc.number_or("bin_deg", 1.0);
        in.zenith_altitude_km = pc.number_or("zenith_altitude_km", 408.0);
        if (in.bin_width_deg <= 0.0) fail("$.pass.bin_deg", "bin width must be > 0");
        pc.reject_unknown();
        s.pass = in;
    }
    if (const json* p = c.find("chain")) {
        Ctx cc(*p, "$.chain");
        ChainInput in;
        in.ground_central_angle_deg = cc.number("ground_central_angle_deg");
        in.satellite_altitude_km = cc.number_or("satellite_altitude_km", 408.0);
        in.link_distance_km = cc.number_or("link_distance_km", 1000.0);
        in.required_capacity_bits = cc.number("required_capacity_bits");
        in.intersat_skr_bps = cc.number("intersat_skr_bps");
        cc.reject_unknown();
        s.chain = in;
    }
    if (const json* p = c.find("graph")) {
        s.graph = parse_graph(*p, "$.graph", base_dir, s.protocol, s.security, s.wavelength_m);
    }
    if (const json* p = c.find("route")) {
        Ctx rc(*p, "$.route");
        RouteInput in;
        const json& w = rc.get("window");
        if (!w.is_array() || w.size() != 2) fail("$.route.window", "expected [start_s, end_s]");
        in.window = {w[0].get<double>(), w[1].get<double>()};
        const json& t = rc.get("targets");
        if (!t.is_array() || t.size() < 2) {
            fail("$.route.targets", "expected at least two node ids");
        }
        for (const auto& id : t) in.targets.push_back(id.get<std::string>());
        in.key_size_bits = rc.number("key_size_bits");
        if (in.key_size_bits <= 0.0) fail("$.route.key_size_bits", "must be > 0");
        rc.reject_unknown();
        s.route = in;
    }
    c.reject_unknown();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace cvqkd::scenario
