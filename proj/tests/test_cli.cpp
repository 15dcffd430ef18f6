// End-to-end checks of the command-line tool: determinism, output formats,
// exit codes, and round-trip parseability of the emitted CSVs.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cvqkd/textio.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out = fs::temp_directory_path() / ("cvqkd_cli_" + tag + ".stdout");
    const std::string cmd =
        std::string(CVQKD_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    fs::remove(out);
    const int code = status == -1 ? -1 : WEXITSTATUS(status);
    return {code, buf.str()};
}

std::string scenario(const std::string& name) {
    return std::string(CVQKD_DATA_DIR) + "/scenarios/" + name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(cvqkd::textio::split_csv(line));
    }
    return rows;
}

}  // namespace

TEST_CASE("skr sweep output") {
    const fs::path out = fs::temp_directory_path() / "cvqkd_test_fibre.csv";
    const auto r = run_cli("skr --scenario " + scenario("fibre_fixed_beta.json") +
                               " --out " + out.string(),
                           "fibre");
    REQUIRE(r.exit_code == 0);
    const std::string text = slurp(out);
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 302);  // header + 301 grid points
    CHECK(rows[0] == std::vector<std::string>{"x", "transmittance", "snr_db", "beta",
                                              "fer", "skr_bps"});
    // With fixed beta the usable rate decays monotonically with distance:
    // the positive region is a prefix, and inside it (FER below 1) the raw
    // rate is non-increasing. Below the FER cliff the rate is negative and
    // creeps back toward -f*delta_n as the channel dies, so the clamped
    // usable rate is the monotone quantity.
    double prev_usable = 1e300;
    double prev_raw = 1e300;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 6);
        const double skr = std::stod(rows[i][5]);
        const double fer = std::stod(rows[i][4]);
        const double usable = std::max(skr, 0.0);
        CHECK(usable <= prev_usable + 1e-9);
        prev_usable = usable;
        if (fer < 1.0) {
            CHECK(skr <= prev_raw + 1e-9);
            prev_raw = skr;
        }
    }
    // first row is the back-to-back channel
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));

    SUBCASE("byte-identical across runs") {
        const fs::path out2 = fs::temp_directory_path() / "cvqkd_test_fibre2.csv";
        run_cli("skr --scenario " + scenario("fibre_fixed_beta.json") + " --out " +
                    out2.string(),
                "fibre2");
        CHECK(slurp(out2) == text);
        fs::remove(out2);
    }
    fs::remove(out);
}

TEST_CASE("empirical-beta fibre sweep has a positive band, not monotone decay") {
    const fs::path out = fs::temp_directory_path() / "cvqkd_test_fibre_md.csv";
    REQUIRE(run_cli("skr --scenario " + scenario("fibre_md.json") + " --out " + out.string(),
                    "fibremd")
                .exit_code == 0);
    const auto rows = parse_csv(slurp(out));
    fs::remove(out);
    bool short_negative = false, mid_positive = false, long_negative = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double d = std::stod(rows[i][0]);
        const double skr = std::stod(rows[i][5]);
        if (d < 10.0 && skr < 0.0) short_negative = true;
        if (d > 40.0 && d < 90.0 && skr > 0.0) mid_positive = true;
        if (d > 150.0 && skr < 0.0) long_negative = true;
    }
    CHECK(short_negative);  // +3.9 dB sits above the MD fit's working band
    CHECK(mid_positive);
    CHECK(long_negative);
}

TEST_CASE("empty sweep emits a header-only CSV") {
    const fs::path dir = fs::temp_directory_path() / "cvqkd_test_empty";
    fs::create_directories(dir);
    const fs::path scen = dir / "empty.json";
    {
        std::ofstream f(scen);
        f << R"({"channel": {"type": "fibre"},
                 "sweep": {"variable": "distance_km", "start": 10, "stop": 5, "step": 1}})";
    }
    const fs::path out = dir / "empty.csv";
    const auto r = run_cli("skr --scenario " + scen.string() + " --out " + out.string(),
                           "empty");
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(out) == "x,transmittance,snr_db,beta,fer,skr_bps\n");
    fs::remove_all(dir);
}

TEST_CASE("capacity command") {
    const fs::path out = fs::temp_directory_path() / "cvqkd_test_cap.csv";
    const auto r = run_cli("capacity --scenario " + scenario("capacity_iss_downlink.json") +
                               " --out " + out.string(),
                           "cap");
    REQUIRE(r.exit_code == 0);

    // stdout carries the one-line summary
    const auto summary = parse_csv(r.stdout_text);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0] == std::vector<std::string>{"total_bits", "usable_fraction"});
    const double total = std::stod(summary[1][0]);
    const double usable = std::stod(summary[1][1]);
    CHECK(total > 1e8);   // order 10^2 Mbit
    CHECK(total < 1e9);
    CHECK(usable > 0.2);
    CHECK(usable < 0.5);

    // per-bin CSV re-parses and sums to the reported total
    const auto rows = parse_csv(slurp(out));
    REQUIRE(rows.size() > 10);
    CHECK(rows[0] ==
          std::vector<std::string>{"bin_deg", "dwell_s", "skr_bps", "capacity_bits"});
    double sum = 0.0, dwell = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 4);
        sum += std::stod(rows[i][3]);
        dwell += std::stod(rows[i][1]);
    }
    CHECK(sum == doctest::Approx(total).epsilon(1e-7));
    CHECK(dwell == doctest::Approx(663.0).epsilon(1e-6));
    fs::remove(out);

    SUBCASE("a pass stuck below the onset yields zero capacity") {
        const fs::path dir = fs::temp_directory_path() / "cvqkd_test_lowpass";
        fs::create_directories(dir);
        {
            std::ofstream f(dir / "low.csv");
            f << "time_s,elevation_deg\n";
            for (int t = 0; t <= 120; ++t)
                f << t << "," << (5.0 + 0.05 * t) << "\n";
        }
        std::ifstream src(scenario("capacity_iss_downlink.json"));
        std::stringstream buf;
        buf << src.rdbuf();
        std::string text = buf.str();
        const auto pos = text.find("../passes/iss_mjo.csv");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, std::string("../passes/iss_mjo.csv").size(),
                     (dir / "low.csv").string());
        {
            std::ofstream f(dir / "scen.json");
            f << text;
        }
        const auto low = run_cli("capacity --scenario " + (dir / "scen.json").string(),
                                 "lowcap");
        REQUIRE(low.exit_code == 0);
        const auto lines = parse_csv(low.stdout_text);
        CHECK(std::stod(lines.back()[0]) == 0.0);
        fs::remove_all(dir);
    }
}

TEST_CASE("chain command") {
    const auto r = run_cli("chain --scenario " + scenario("chain_madrid_goldstone.json"),
                           "chain");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("min_links,9") != std::string::npos);
    CHECK(r.stdout_text.find("max_links,10") != std::string::npos);
    CHECK(r.stdout_text.find("min_satellites,10") != std::string::npos);
    CHECK(r.stdout_text.find("max_satellites,11") != std::string::npos);
    CHECK(r.stdout_text.find("valid,true") != std::string::npos);

    const auto r2 = run_cli("chain --scenario " + scenario("chain_madrid_canberra.json"),
                            "chain2");
    CHECK(r2.stdout_text.find("min_links,18") != std::string::npos);
    CHECK(r2.stdout_text.find("max_links,19") != std::string::npos);
    CHECK(r2.stdout_text.find("min_satellites,19") != std::string::npos);
    CHECK(r2.stdout_text.find("max_satellites,20") != std::string::npos);
}

TEST_CASE("route command") {
    SUBCASE("nominal route is feasible and ordered") {
        const fs::path out = fs::temp_directory_path() / "cvqkd_test_route.csv";
        const auto r = run_cli("route --scenario " + scenario("route_two_stations.json") +
                                   " --out " + out.string(),
                               "route");
        REQUIRE(r.exit_code == 0);
        CHECK(r.stdout_text.find("route,ogs1->sat2->sub3->sat4->ogs5") != std::string::npos);
        CHECK(r.stdout_text.find("feasible,true") != std::string::npos);
        const auto rows = parse_csv(slurp(out));
        REQUIRE(rows.size() == 5);  // header + 4 hops
        CHECK(rows[0] == std::vector<std::string>{"from", "to", "capacity_bits"});
        CHECK(rows[1][0] == "ogs1");
        CHECK(rows[4][1] == "ogs5");
        fs::remove(out);
    }
    SUBCASE("oversized key is infeasible with condition 2 named") {
        const auto r = run_cli("route --scenario " + scenario("route_two_stations.json") +
                                   " --key-size 5e6",
                               "route2");
        CHECK(r.exit_code == 4);
        CHECK(r.stdout_text.find("condition_fits_key,false") != std::string::npos);
        CHECK(r.stdout_text.find("feasible,false") != std::string::npos);
    }
    SUBCASE("unreachable target") {
        const auto r = run_cli("route --scenario " + scenario("route_two_stations.json") +
                                   " --targets ogs1 --targets nowhere",
                               "route3");
        CHECK(r.exit_code == 2);  // unknown node id is a validation error
    }
    SUBCASE("trivial single-node route") {
        const auto r = run_cli("route --scenario " + scenario("route_two_stations.json") +
                                   " --targets ogs1 --targets ogs1",
                               "route4");
        CHECK(r.exit_code == 0);
        CHECK(r.stdout_text.find("route,ogs1\n") != std::string::npos);
        CHECK(r.stdout_text.find("feasible,true") != std::string::npos);
    }
}

TEST_CASE("elevation sweeps reproduce the calibrated onsets") {
    const fs::path down_out = fs::temp_directory_path() / "cvqkd_test_down.csv";
    const fs::path up_out = fs::temp_directory_path() / "cvqkd_test_up.csv";
    REQUIRE(run_cli("skr --scenario " + scenario("downlink_elevation.json") + " --out " +
                        down_out.string(),
                    "down")
                .exit_code == 0);
    REQUIRE(run_cli("skr --scenario " + scenario("uplink_elevation.json") + " --out " +
                        up_out.string(),
                    "up")
                .exit_code == 0);
    auto onset = [](const std::string& text) {
        for (const auto& row : parse_csv(text)) {
            if (row[0] == "x") continue;
            if (std::stod(row[5]) > 0.0) return std::stod(row[0]);
        }
        return -1.0;
    };
    const double down = onset(slurp(down_out));
    const double up = onset(slurp(up_out));
    CHECK(down == 29.0);
    CHECK(up == 74.0);
    fs::remove(down_out);
    fs::remove(up_out);
}

TEST_CASE("inter-satellite sweeps under both reconciliation fits") {
    // Under the magnitude-signed-power reading of the negative-base fit the
    // MLC-MSD efficiency clamps to 1 at every SNR, so it reaches the same
    // long-distance cutoff as MD and additionally covers the short,
    // high-SNR distances where the MD fit has collapsed to zero.
    const fs::path md_out = fs::temp_directory_path() / "cvqkd_test_is_md.csv";
    const fs::path mlc_out = fs::temp_directory_path() / "cvqkd_test_is_mlc.csv";
    REQUIRE(run_cli("skr --scenario " + scenario("intersat_md.json") + " --out " +
                        md_out.string(),
                    "ismd")
                .exit_code == 0);
    REQUIRE(run_cli("skr --scenario " + scenario("intersat_mlc.json") + " --out " +
                        mlc_out.string(),
                    "ismlc")
                .exit_code == 0);
    auto stats = [](const std::string& text) {
        double first = -1.0, last = -1.0;
        for (const auto& row : parse_csv(text)) {
            if (row[0] == "x") continue;
            if (std::stod(row[5]) > 0.0) {
                if (first < 0.0) first = std::stod(row[0]);
                last = std::stod(row[0]);
            }
        }
        return std::pair<double, double>{first, last};
    };
    const auto [md_first, md_last] = stats(slurp(md_out));
    const auto [mlc_first, mlc_last] = stats(slurp(mlc_out));
    CHECK(md_last == 1040.0);
    CHECK(mlc_last == md_last);
    CHECK(mlc_first < md_first);
    fs::remove(md_out);
    fs::remove(mlc_out);
}

TEST_CASE("underwater sweep dies within a few hundred metres") {
    const fs::path out = fs::temp_directory_path() / "cvqkd_test_uw.csv";
    REQUIRE(run_cli("skr --scenario " + scenario("underwater_pure_sea.json") + " --out " +
                        out.string(),
                    "uw")
                .exit_code == 0);
    double last_positive = -1.0;
    for (const auto& row : parse_csv(slurp(out))) {
        if (row[0] == "x") continue;
        if (std::stod(row[5]) > 0.0) last_positive = std::stod(row[0]);
    }
    CHECK(last_positive == 102.0);  // metres of pure sea water
    fs::remove(out);
}

TEST_CASE("validation failures exit with code 2") {
    const auto missing = run_cli("skr --scenario /nonexistent.json", "bad1");
    CHECK(missing.exit_code == 2);

    const fs::path dir = fs::temp_directory_path() / "cvqkd_test_badscen";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"channel": {"type": "warp_drive"}})";
    }
    const auto bad = run_cli("skr --scenario " + (dir / "bad.json").string(), "bad2");
    CHECK(bad.exit_code == 2);
    fs::remove_all(dir);
}
