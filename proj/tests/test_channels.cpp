#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvqkd/channels.hpp"
#include "cvqkd/errors.hpp"

using namespace cvqkd;
using namespace cvqkd::channels;

namespace {

// Independent erf^-1 oracle: plain bisection on std::erf.
double erf_inv_bisect(double y) {
    double lo = -6.0, hi = 6.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::erf(mid) < y) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Independent slant-range oracle: intersect the sight ray from the ground
// point with the target shell (quadratic root), instead of the law of
// cosines used by the implementation.
double slant_by_ray_intersection(double elevation_deg, double shell_km, double ogs_km) {
    const double r1 = kEarthRadiusKm + ogs_km;
    const double r2 = kEarthRadiusKm + shell_km;
    const double s = std::sin(deg_to_rad(elevation_deg));
    return -r1 * s + std::sqrt(r1 * r1 * s * s + r2 * r2 - r1 * r1);
}

OpticsParams downlink_optics() {
    OpticsParams o;
    o.transmitter_diameter_m = 0.3;
    o.receiver_diameter_m = 1.0;
    return o;
}

}  // namespace

TEST_CASE("combining attenuation sources") {
    CHECK(combine_transmittances({}) == 1.0);
    const std::vector<double> two{2.0, 5.0};
    CHECK(combine_transmittances(two) == doctest::Approx(0.1).epsilon(1e-12));
    const std::vector<double> db{std::pow(10.0, 0.3), std::pow(10.0, 0.7)};
    CHECK(combine_transmittances(db) == doctest::Approx(0.1).epsilon(1e-12));
    const std::vector<double> bad{0.5};
    CHECK_THROWS_AS(combine_transmittances(bad), validation_error);
}

TEST_CASE("fibre transmittance") {
    CHECK(fibre_transmittance({0.0}) == 1.0);
    CHECK(fibre_transmittance({50.0}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(fibre_transmittance({100.0}) == doctest::Approx(0.01).epsilon(1e-12));

    // multiplicative over concatenation
    for (double d1 : {3.0, 17.5, 42.0})
        for (double d2 : {1.0, 8.25, 61.0}) {
            CHECK(fibre_transmittance({d1 + d2}) ==
                  doctest::Approx(fibre_transmittance({d1}) * fibre_transmittance({d2}))
                      .epsilon(1e-12));
        }
}

TEST_CASE("water presets") {
    const auto pure = water_preset_coefficients(WaterPreset::pure_sea);
    CHECK(pure.absorption_per_m == 0.0405);
    CHECK(pure.scattering_per_m == 0.0025);
    CHECK(pure.extinction_per_m == 0.043);
    CHECK(water_preset_coefficients(WaterPreset::clear_ocean).extinction_per_m == 0.151);
    CHECK(water_preset_coefficients(WaterPreset::coastal_ocean).extinction_per_m == 0.398);
    CHECK(water_preset_coefficients(WaterPreset::turbid_harbour).extinction_per_m == 2.190);
}

TEST_CASE("underwater extinction model") {
    SUBCASE("zero chlorophyll reduces to scaled pure-water absorption") {
        const auto r = underwater_extinction(520.0, 0.0, 0.05, 0.10);
        CHECK(r.scattering_per_m == 0.0);
        CHECK(r.absorption_per_m == doctest::Approx(0.05326279794623039).epsilon(1e-12));
        CHECK(r.extinction_per_m == doctest::Approx(r.absorption_per_m));
        CHECK(!r.outside_validated_band);
    }
    SUBCASE("direct evaluation at 550 nm") {
        const auto r = underwater_extinction(550.0, 1.0, 0.05, 0.05);
        CHECK(r.absorption_per_m == doctest::Approx(0.055272439675125976).epsilon(1e-12));
        CHECK(r.scattering_per_m == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("wavelengths outside 400-700 nm are flagged") {
        CHECK(underwater_extinction(350.0, 0.5, 0.05, 0.05).outside_validated_band);
        CHECK(underwater_extinction(1550.0, 0.5, 0.05, 0.05).outside_validated_band);
        CHECK(!underwater_extinction(400.0, 0.5, 0.05, 0.05).outside_validated_band);
    }
}

TEST_CASE("underwater transmittance") {
    CHECK(underwater_transmittance(0.043, 0.0) == 1.0);
    CHECK(underwater_transmittance(0.043, 100.0) ==
          doctest::Approx(0.013568559012200934).epsilon(1e-12));
    CHECK(underwater_transmittance(2.190, 10.0) ==
          doctest::Approx(3.08283901313868e-10).epsilon(1e-12));
    // multiplicative over concatenation
    CHECK(underwater_transmittance(0.151, 35.0) ==
          doctest::Approx(underwater_transmittance(0.151, 15.0) *
                          underwater_transmittance(0.151, 20.0))
              .epsilon(1e-12));
}

TEST_CASE("beam radius") {
    CHECK(beam_radius(0.2, 1550e-9, 0.0) == 0.2);
    CHECK(beam_radius(0.2, 1550e-9, 1e6) ==
          doctest::Approx(2.4749956752523654).epsilon(1e-12));
    // far field is asymptotically linear in z
    const double w1 = beam_radius(0.2, 1550e-9, 5e8);
    const double w2 = beam_radius(0.2, 1550e-9, 1e9);
    CHECK(w2 / w1 == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("inter-satellite transmittance") {
    CHECK(intersat_transmittance({1e6, 50.0, 0.2, 1550e-9}) == doctest::Approx(1.0));
    CHECK(intersat_transmittance({1e6, 0.2, 0.2, 1550e-9}) ==
          doctest::Approx(0.0129750265510723).epsilon(1e-10));
    CHECK(intersat_transmittance({0.0, 0.2, 0.2, 1550e-9}) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));

    // decreasing in distance, increasing in receiver radius
    double prev = 2.0;
    for (double z = 1e5; z <= 3e6; z += 1e5) {
        const double t = intersat_transmittance({z, 0.2, 0.2, 1550e-9});
        CHECK(t < prev);
        CHECK(t > 0.0);
        CHECK(t < 1.0);
        prev = t;
    }
    prev = 0.0;
    for (double ra = 0.05; ra <= 2.0; ra += 0.05) {
        const double t = intersat_transmittance({1e6, ra, 0.2, 1550e-9});
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("slant geometry") {
    SUBCASE("zenith identities") {
        CHECK(slant_total_distance(90.0, 408.0, 1.029) ==
              doctest::Approx(406.971).epsilon(1e-9));
        CHECK(slant_total_distance(90.0, 408.0, 0.0) == doctest::Approx(408.0).epsilon(1e-9));
        CHECK(effective_atmosphere(90.0, 1.029) == doctest::Approx(18.971).epsilon(1e-9));
        CHECK(effective_atmosphere(90.0, 0.0) == doctest::Approx(20.0).epsilon(1e-9));
    }
    SUBCASE("matches the independent ray-intersection construction") {
        for (int th = 1; th <= 90; ++th) {
            CHECK(slant_total_distance(th, 408.0, 0.0) ==
                  doctest::Approx(slant_by_ray_intersection(th, 408.0, 0.0)).epsilon(1e-9));
            CHECK(effective_atmosphere(th, 1.029) ==
                  doctest::Approx(slant_by_ray_intersection(th, 20.0, 1.029)).epsilon(1e-9));
        }
        CHECK(slant_total_distance(30.0, 408.0, 0.0) ==
              doctest::Approx(753.1051147582682).epsilon(1e-10));
        const double le20 = effective_atmosphere(20.0, 0.0);
        CHECK(le20 == doctest::Approx(57.801244068091).epsilon(1e-10));
        CHECK(le20 > 20.0);  // low elevation stretches the air path
    }
    SUBCASE("range check and monotonicity") {
        CHECK(slant_total_distance(30.0, 408.0, 0.0) > 408.0);
        CHECK(slant_total_distance(30.0, 408.0, 0.0) < 1600.0);
        double prev_tot = 1e9, prev_atm = 1e9;
        for (int th = 1; th <= 90; ++th) {
            const double lt = slant_total_distance(th, 408.0, 1.029);
            const double la = effective_atmosphere(th, 1.029);
            CHECK(lt < prev_tot);
            CHECK(la < prev_atm);
            prev_tot = lt;
            prev_atm = la;
        }
        CHECK_THROWS_AS(slant_total_distance(0.0, 408.0, 0.0), validation_error);
        CHECK_THROWS_AS(slant_total_distance(91.0, 408.0, 0.0), validation_error);
    }
}

TEST_CASE("geometric loss") {
    OpticsParams ideal = downlink_optics();
    ideal.pointing_loss = 0.0;
    CHECK(geometric_loss_db(406.971, 1550e-9, ideal).loss_db ==
          doctest::Approx(6.455478135153525).epsilon(1e-12));

    OpticsParams pointed = downlink_optics();  // L_p = 0.1 default
    CHECK(geometric_loss_db(406.971, 1550e-9, pointed).loss_db ==
          doctest::Approx(6.913053040760277).epsilon(1e-12));

    // doubling the distance adds exactly 20 log10 2
    const double six = 20.0 * std::log10(2.0);
    CHECK(geometric_loss_db(813.942, 1550e-9, ideal).loss_db -
              geometric_loss_db(406.971, 1550e-9, ideal).loss_db ==
          doctest::Approx(six).epsilon(1e-12));

    // halving the receiver diameter adds the same
    OpticsParams half = ideal;
    half.receiver_diameter_m = 0.5;
    CHECK(geometric_loss_db(406.971, 1550e-9, half).loss_db -
              geometric_loss_db(406.971, 1550e-9, ideal).loss_db ==
          doctest::Approx(six).epsilon(1e-12));

    CHECK(geometric_loss_db(406.971, 1550e-9, ideal).far_field);
    // inside the far-field boundary the result is flagged
    CHECK(!geometric_loss_db(1e-4, 1550e-9, ideal).far_field);
    CHECK_THROWS_AS(geometric_loss_db(-1.0, 1550e-9, ideal), validation_error);
}

TEST_CASE("mie scattering") {
    CHECK(mie_scattering_db_per_km(200.0, 1550.0) ==
          doctest::Approx(0.016188356053152806).epsilon(1e-12));
    CHECK(mie_scattering_db_per_km(20.0, 1550.0) ==
          doctest::Approx(0.22089884772850432).epsilon(1e-12));

    // V < 0.5 km: wavelength-independent branch (p = 0)
    CHECK(mie_scattering_db_per_km(0.4, 1550.0) ==
          doctest::Approx(mie_scattering_db_per_km(0.4, 550.0)).epsilon(1e-12));

    // decreasing in visibility
    double prev = 1e9;
    for (double v = 0.1; v <= 300.0; v *= 1.35) {
        const double a = mie_scattering_db_per_km(v, 1550.0);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("Cn2 altitude profile") {
    CHECK(cn2_profile(0.0, 21.0, 1.7e-14) ==
          doctest::Approx(2.7e-16 + 1.7e-14).epsilon(1e-12));
    CHECK(cn2_profile(10000.0, 21.0, 1.7e-14) ==
          doctest::Approx(1.6657319221014648e-17).epsilon(1e-10));
    CHECK(cn2_profile(100000.0, 21.0, 1.7e-14) < 1e-20);
}

TEST_CASE("rytov variance") {
    CHECK(rytov_variance_closed_form(0.0, 20e3, 1550e-9) == 0.0);
    CHECK(rytov_variance_closed_form(1e-16, 20e3, 1550e-9) ==
          doctest::Approx(0.48230186424467525).epsilon(1e-12));
    // linear in Cn2
    CHECK(rytov_variance_closed_form(2e-16, 20e3, 1550e-9) ==
          doctest::Approx(2.0 * 0.48230186424467525).epsilon(1e-12));

    SUBCASE("quadrature matches the closed form on a (lambda, Cn2, L) grid") {
        for (double lam : {850e-9, 1064e-9, 1550e-9, 1625e-9}) {
            for (double cn2 : {1e-16, 1e-14}) {
                for (double l : {5e3, 20e3, 60e3}) {
                    const double closed = rytov_variance_closed_form(cn2, l, lam);
                    const double quad = rytov_variance_quadrature(
                        [cn2](double) { return cn2; }, l, lam);
                    CHECK(std::abs(quad - closed) / closed <= 1e-6);
                }
            }
        }
    }

    SUBCASE("profile mode integrates the altitude-mapped Cn2") {
        Atmosphere atm;
        atm.cn2 = Cn2Model::altitude_profile(21.0, 1.7e-14);
        CHECK(rytov_variance(atm, 45.0, 0.0, 1550e-9) ==
              doctest::Approx(1.782432555200874).epsilon(1e-6));
        // stronger ground turbulence raises the variance
        Atmosphere weaker;
        weaker.cn2 = Cn2Model::altitude_profile(21.0, 1.7e-16);
        CHECK(rytov_variance(weaker, 45.0, 0.0, 1550e-9) <
              rytov_variance(atm, 45.0, 0.0, 1550e-9));
    }
}

TEST_CASE("scintillation index") {
    CHECK(scintillation_index(0.0, 1.0) == 0.0);
    CHECK(scintillation_index(1.0, 1.0) ==
          doctest::Approx(0.24675678560658887).epsilon(1e-12));
    CHECK(scintillation_index(0.5, 0.0) ==
          doctest::Approx(0.20608161112626044).epsilon(1e-12));

    // monotone increasing in the Rytov variance over the operating regime
    // (the printed fit dips slightly for finite apertures past sigma_R^2 ~ 5)
    for (double d : {0.0, 1.0, 5.0}) {
        double prev = -1.0;
        const double s_max = d == 0.0 ? 10.0 : 3.5;
        for (double s = 0.0; s <= s_max; s += 0.25) {
            const double si = scintillation_index(s, d);
            CHECK(si >= prev);
            prev = si;
        }
    }

    // saturates as the Rytov variance grows at fixed aperture
    const double huge1 = scintillation_index(1e8, 1.0);
    const double huge2 = scintillation_index(1e10, 1.0);
    CHECK(huge1 < 10.0);
    CHECK(huge2 < 10.0);
    CHECK(std::abs(huge2 - huge1) < 0.2);

    CHECK(uplink_scintillation_index(0.0) == doctest::Approx(0.2));
    CHECK(uplink_scintillation_index(0.15) == doctest::Approx(0.35));
    CHECK(uplink_scintillation_index(1.0) == doctest::Approx(1.2));
}

TEST_CASE("aperture parameter strategies") {
    const double le_km = 20.0;
    const double lit = aperture_parameter(1.0, 1550e-9, le_km, ApertureModel::literal);
    CHECK(lit == doctest::Approx(std::pow(kPi / (2.0 * 20e3), 2.0)).epsilon(1e-12));
    CHECK(lit < 1e-8);  // effectively a point receiver
    const double fre = aperture_parameter(1.0, 1550e-9, le_km, ApertureModel::fresnel);
    const double k = 2.0 * kPi / 1550e-9;
    CHECK(fre == doctest::Approx(std::sqrt(k / (4.0 * 20e3))).epsilon(1e-12));
}

TEST_CASE("erf_inv against bisection oracle") {
    for (double y : {-0.998, -0.9, -0.5, -0.1, -1e-6, 0.0, 1e-6, 0.3, 0.5, 0.7,
                     0.9, 0.99, 0.998, 0.999999}) {
        CHECK(erf_inv(y) == doctest::Approx(erf_inv_bisect(y)).epsilon(1e-11));
    }
    CHECK(erf_inv(0.5) == doctest::Approx(0.4769362762044699).epsilon(1e-11));
    CHECK_THROWS_AS(erf_inv(1.0), validation_error);
    CHECK_THROWS_AS(erf_inv(-1.0), validation_error);
}

TEST_CASE("scintillation fade loss") {
    CHECK(scintillation_loss_db(0.0, 1e-3) == 0.0);
    CHECK(scintillation_loss_db(0.5, 1e-3) ==
          doctest::Approx(9.426365414102326).epsilon(1e-10));
    // p_thr = 0.5: erfinv term vanishes, only the half-log offset remains
    CHECK(scintillation_loss_db(0.5, 0.5) ==
          doctest::Approx(0.880467482256879).epsilon(1e-10));
    CHECK(scintillation_loss_db(0.5, 0.5) ==
          doctest::Approx(4.343 * 0.5 * std::log(1.5)).epsilon(1e-10));
    // large outage tolerance flips the margin negative; surfaced, not clamped
    CHECK(scintillation_loss_db(0.5, 0.9) ==
          doctest::Approx(-2.663605515647427).epsilon(1e-10));
    CHECK_THROWS_AS(scintillation_loss_db(0.5, 0.0), validation_error);
    CHECK_THROWS_AS(scintillation_loss_db(0.5, 1.0), validation_error);

    // monotone increasing in sigma_I^2 at the default outage probability
    double prev = -1.0;
    for (double s = 0.0; s <= 2.0; s += 0.05) {
        const double a = scintillation_loss_db(s, 1e-3);
        CHECK(a >= prev);
        prev = a;
    }
}

TEST_CASE("excess-noise source catalogue") {
    CHECK(excess_noise_sources(ChannelFamily::fibre) ==
          std::vector<std::string>{"vibrations", "heat"});
    CHECK(excess_noise_sources(ChannelFamily::underwater) ==
          std::vector<std::string>{"precipitates", "small organisms", "heat currents"});
    CHECK(excess_noise_sources(ChannelFamily::inter_satellite) ==
          std::vector<std::string>{"radiation"});
    CHECK(excess_noise_sources(ChannelFamily::satellite_ground) ==
          std::vector<std::string>{"atmospheric aerosols", "atmospheric turbulence"});
}

TEST_CASE("parameter trends that should improve the link") {
    // larger apertures reduce the geometric loss
    OpticsParams base = downlink_optics();
    OpticsParams bigger = base;
    bigger.receiver_diameter_m = 2.0;
    CHECK(geometric_loss_db(500.0, 1550e-9, bigger).loss_db <
          geometric_loss_db(500.0, 1550e-9, base).loss_db);

    // smaller pointing loss reduces the geometric loss
    OpticsParams steadier = base;
    steadier.pointing_loss = 0.01;
    CHECK(geometric_loss_db(500.0, 1550e-9, steadier).loss_db <
          geometric_loss_db(500.0, 1550e-9, base).loss_db);

    // a higher observatory shortens the path and raises the transmittance
    SatGroundLink low;
    low.elevation_deg = 40.0;
    low.zenith_altitude_km = 408.0;
    low.ogs_altitude_km = 0.0;
    low.optics = base;
    low.atmosphere = Atmosphere::good();
    SatGroundLink high = low;
    high.ogs_altitude_km = 3.0;
    CHECK(satground_transmittance(high, 1550e-9).transmittance >
          satground_transmittance(low, 1550e-9).transmittance);

    // more chlorophyll absorbs and scatters more
    CHECK(underwater_extinction(520.0, 2.0, 0.05, 0.05).extinction_per_m >
          underwater_extinction(520.0, 0.5, 0.05, 0.05).extinction_per_m);

    // UnderwaterLink carries its own extinction
    CHECK(underwater_transmittance(UnderwaterLink{100.0, 0.043}) ==
          doctest::Approx(underwater_transmittance(0.043, 100.0)));
}

TEST_CASE("satellite-ground composition") {
    SatGroundLink link;
    link.elevation_deg = 90.0;
    link.zenith_altitude_km = 408.0;
    link.ogs_altitude_km = 1.029;
    link.optics = downlink_optics();
    link.atmosphere = Atmosphere::good();

    SUBCASE("zenith regression values") {
        const auto r = satground_transmittance(link, 1550e-9);
        CHECK(r.budget.slant_distance_km == doctest::Approx(406.971).epsilon(1e-9));
        CHECK(r.budget.effective_atmosphere_km == doctest::Approx(18.971).epsilon(1e-9));
        CHECK(r.budget.geometric_db == doctest::Approx(6.9130530407598965).epsilon(1e-10));
        CHECK(r.budget.scattering_db == doctest::Approx(0.30710930268164954).epsilon(1e-10));
        CHECK(r.budget.rytov_variance == doctest::Approx(0.4377868301296496).epsilon(1e-10));
        CHECK(r.budget.scintillation_index_sq ==
              doctest::Approx(0.18076916060718928).epsilon(1e-9));
        CHECK(r.budget.scintillation_db == doctest::Approx(5.831645679600083).epsilon(1e-9));
        CHECK(r.transmittance == doctest::Approx(0.049524397153175324).epsilon(1e-9));
        CHECK(r.budget.far_field);
        CHECK(r.budget.total_db ==
              doctest::Approx(r.budget.geometric_db + r.budget.scattering_db +
                              r.budget.scintillation_db));
    }

    SUBCASE("negligible atmosphere leaves only the geometric loss") {
        SatGroundLink clean = link;
        clean.optics.pointing_loss = 0.0;
        clean.atmosphere.visibility_km = 1e12;
        clean.atmosphere.cn2 = Cn2Model::constant_value(1e-300);
        const auto r = satground_transmittance(clean, 1550e-9);
        const double geo =
            geometric_loss_db(r.budget.slant_distance_km, 1550e-9, clean.optics).loss_db;
        CHECK(r.transmittance == doctest::Approx(std::pow(10.0, -geo / 10.0)).epsilon(1e-9));
    }

    SUBCASE("uplink never beats downlink at equal optics") {
        for (int th = 10; th <= 90; th += 10) {
            SatGroundLink down = link;
            down.elevation_deg = th;
            SatGroundLink up = down;
            up.direction = Direction::uplink;
            const auto td = satground_transmittance(down, 1550e-9);
            const auto tu = satground_transmittance(up, 1550e-9);
            CHECK(tu.transmittance < td.transmittance);
        }
    }

    SUBCASE("aperture averaging reduces the scintillation loss") {
        SatGroundLink fres = link;
        fres.aperture_model = ApertureModel::fresnel;
        const auto lit = satground_transmittance(link, 1550e-9);
        const auto avg = satground_transmittance(fres, 1550e-9);
        CHECK(avg.budget.scintillation_db < lit.budget.scintillation_db);
        CHECK(avg.budget.geometric_db == doctest::Approx(lit.budget.geometric_db));
    }

    SUBCASE("atmosphere presets") {
        const auto good = Atmosphere::good();
        CHECK(good.visibility_km == 200.0);
        CHECK(good.cn2.constant);
        CHECK(good.cn2.cn2 == 1e-16);
        const auto bad = Atmosphere::bad();
        CHECK(bad.visibility_km == 20.0);
        CHECK(bad.cn2.cn2 == 1e-12);
        SatGroundLink stormy = link;
        stormy.atmosphere = bad;
        CHECK(satground_transmittance(stormy, 1550e-9).transmittance <
              satground_transmittance(link, 1550e-9).transmittance);
    }

    SUBCASE("validation") {
        SatGroundLink bad = link;
        bad.elevation_deg = 0.0;
        CHECK_THROWS_AS(satground_transmittance(bad, 1550e-9), validation_error);
        bad = link;
        bad.ogs_altitude_km = 25.0;
        CHECK_THROWS_AS(satground_transmittance(bad, 1550e-9), validation_error);
    }
}
