#include "cvqkd/skr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cvqkd/errors.hpp"

namespace cvqkd::skr {

namespace {

constexpr double kPhysicalityTol = 1e-9;
constexpr double kHolevoTol = 1e-9;

// beta(SNR_dB) fit coefficients c1..c4.
constexpr double kBetaMlcMsd[4] = {0.9655, 1.507e-4, -4.696e-2, -0.2238};
constexpr double kBetaMd[4] = {8.250e-2, 0.1834, 0.9821, -2.815e-5};

// FER(SNR_dB) fit coefficients m1..m3.
constexpr double kFerM1 = 0.8218;
constexpr double kFerM2 = -19.46;
constexpr double kFerM3 = -298.1;

// Magnitude-signed power: keeps the fit real-valued when the base is negative.
double signed_pow(double base, double exponent) {
    return std::copysign(std::pow(std::abs(base), exponent), base);
}

ClampedFraction clamp01(double raw) {
    const double v = std::clamp(raw, 0.0, 1.0);
    return {v, raw, v != raw};
}

void require(bool ok, const char* msg) {
    if (!ok) throw validation_error(msg);
}

}  // namespace

void ProtocolParams::validate() const {
    require(modulation_variance_snu > 0.0, "modulation_variance_snu must be > 0");
    require(excess_noise_snu >= 0.0, "excess_noise_snu must be >= 0");
    require(repetition_rate_hz > 0.0, "repetition_rate_hz must be > 0");
    if (!beta.empirical) {
        require(beta.fixed_value >= 0.0 && beta.fixed_value <= 1.0,
                "fixed beta must be in [0,1]");
    }
}

void SecurityParams::validate() const {
    require(discretisation >= 1, "discretisation must be >= 1");
    require(smoothing_eps > 0.0 && smoothing_eps < 1.0, "smoothing_eps must be in (0,1)");
    require(security_eps > 0.0 && security_eps < 1.0, "security_eps must be in (0,1)");
    require(block_size >= 1.0, "block_size must be >= 1");
    if (estimation_fraction) {
        require(*estimation_fraction >= 0.0 && *estimation_fraction < 1.0,
                "estimation_fraction must be in [0,1)");
    }
}

void CovarianceMatrix::validate() const {
    require(v >= 1.0, "covariance V must be >= 1");
    require(w >= 1.0, "covariance W must be >= 1");
    if (v * w - z * z < 1.0 - kPhysicalityTol) {
        throw validation_error("unphysical covariance: V*W - Z^2 < 1");
    }
}

double correlation_coefficient_gm(double modulation_variance_snu, double transmittance) {
    require(modulation_variance_snu > 0.0, "modulation_variance_snu must be > 0");
    require(transmittance >= 0.0 && transmittance <= 1.0, "transmittance must be in [0,1]");
    const double va = modulation_variance_snu;
    return std::sqrt(transmittance * (va * va + 2.0 * va));
}

CovarianceMatrix build_covariance(double modulation_variance_snu, double transmittance,
                                  double excess_noise_snu) {
    require(excess_noise_snu >= 0.0, "excess_noise_snu must be >= 0");
    CovarianceMatrix cov{
        modulation_variance_snu + 1.0,
        1.0 + transmittance * modulation_variance_snu + transmittance * excess_noise_snu,
        correlation_coefficient_gm(modulation_variance_snu, transmittance)};
    cov.validate();
    return cov;
}

double snr_linear(double modulation_variance_snu, double transmittance,
                  double excess_noise_snu) {
    require(modulation_variance_snu > 0.0, "modulation_variance_snu must be > 0");
    require(transmittance >= 0.0 && transmittance <= 1.0, "transmittance must be in [0,1]");
    require(excess_noise_snu >= 0.0, "excess_noise_snu must be >= 0");
    return transmittance * modulation_variance_snu /
           (2.0 + transmittance * excess_noise_snu);
}

double snr_db(double modulation_variance_snu, double transmittance,
              double excess_noise_snu) {
    const double snr = snr_linear(modulation_variance_snu, transmittance, excess_noise_snu);
    if (snr <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(snr);
}

double mutual_information(double snr, Detection detection) {
    require(snr >= 0.0, "snr must be >= 0");
    const double full = std::log2(1.0 + snr);
    return detection == Detection::heterodyne ? full : 0.5 * full;
}

double g_function(double x) {
    if (x < 0.0) throw validation_error("g_function argument must be >= 0");
    if (x == 0.0) return 0.0;
    return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

SymplecticEigenvalues symplectic_eigenvalues(const CovarianceMatrix& cov) {
    cov.validate();
    const double delta = cov.v * cov.v + cov.w * cov.w - 2.0 * cov.z * cov.z;
    const double det = cov.v * cov.w - cov.z * cov.z;
    double inner = delta * delta - 4.0 * det * det;
    if (inner < 0.0) {
        if (inner < -kPhysicalityTol * std::max(1.0, delta * delta)) {
            throw computation_error("symplectic spectrum: negative discriminant");
        }
        inner = 0.0;
    }
    const double root = std::sqrt(inner);
    return {std::sqrt((delta + root) / 2.0), std::sqrt((delta - root) / 2.0)};
}

double holevo_bound(const CovarianceMatrix& cov, Detection detection) {
    cov.validate();
    const auto [l1, l2] = symplectic_eigenvalues(cov);
    double l3;
    if (detection == Detection::heterodyne) {
        l3 = cov.v - cov.z * cov.z / (cov.w + 1.0);
    } else {
        const double arg = cov.v * (cov.v - cov.z * cov.z / cov.w);
        if (arg < 0.0) throw computation_error("holevo_bound: negative sqrt argument");
        l3 = std::sqrt(arg);
    }
    const double s = g_function(std::max(0.0, (l1 - 1.0) / 2.0)) +
                     g_function(std::max(0.0, (l2 - 1.0) / 2.0)) -
                     g_function(std::max(0.0, (l3 - 1.0) / 2.0));
    if (s < 0.0) {
        if (s < -kHolevoTol) throw computation_error("holevo_bound: negative beyond tolerance");
        return 0.0;
    }
    return s;
}

double skr_asymptotic(double beta, double mutual_info_bits, double holevo_bits) {
    require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1]");
    return beta * mutual_info_bits - holevo_bits;
}

ClampedFraction beta_empirical(double snr_db, Reconciliation scheme) {
    require(std::isfinite(snr_db), "beta_empirical requires finite snr_db");
    const double* c = scheme == Reconciliation::md ? kBetaMd : kBetaMlcMsd;
    const double raw = signed_pow(c[0], c[1] * snr_db) - signed_pow(c[2], c[3] * snr_db);
    return clamp01(raw);
}

ClampedFraction fer_empirical(double snr_db) {
    require(std::isfinite(snr_db), "fer_empirical requires finite snr_db");
    const double raw = 0.5 * (1.0 + kFerM1 * std::atan(kFerM2 * snr_db + kFerM3));
    return clamp01(raw);
}

double delta_n_privacy(const SecurityParams& sec) {
    sec.validate();
    const double d = static_cast<double>(sec.discretisation);
    const double rn = std::sqrt(sec.block_size);
    const double t1 = (d + 1.0) * (d + 1.0) / rn;
    const double t2 = 4.0 * (d + 1.0) * std::sqrt(std::log2(2.0 / sec.smoothing_eps)) / rn;
    const double t3 = 2.0 * std::log2(2.0 / (sec.security_eps * sec.security_eps *
                                             sec.smoothing_eps)) / rn;
    // Final term as typeset: (4 eps_s d / (eps sqrt(N))) / sqrt(N). Negligible
    // at the default security values but kept for fidelity.
    const double t4 = (4.0 * sec.smoothing_eps * d / (sec.security_eps * rn)) / rn;
    return t1 + t2 + t3 + t4;
}

SkrResult skr_finite(const ProtocolParams& proto, const SecurityParams& sec,
                     double transmittance, std::optional<double> excess_noise_override) {
    proto.validate();
    sec.validate();
    const double xi = excess_noise_override.value_or(proto.excess_noise_snu);
    require(xi >= 0.0, "excess noise must be >= 0");
    require(transmittance >= 0.0 && transmittance <= 1.0, "transmittance must be in [0,1]");

    SkrResult r{};
    r.snr_linear = snr_linear(proto.modulation_variance_snu, transmittance, xi);
    r.snr_db = r.snr_linear > 0.0 ? 10.0 * std::log10(r.snr_linear)
                                  : -std::numeric_limits<double>::infinity();

    if (std::isfinite(r.snr_db)) {
        r.fer = fer_empirical(r.snr_db);
        r.beta = proto.beta.empirical ? beta_empirical(r.snr_db, proto.reconciliation)
                                      : ClampedFraction{proto.beta.fixed_value,
                                                        proto.beta.fixed_value, false};
    } else {
        // Dead channel: both fits approach 1 as the SNR falls.
        r.fer = {1.0, std::numeric_limits<double>::infinity(), true};
        r.beta = proto.beta.empirical
                     ? ClampedFraction{1.0, std::numeric_limits<double>::infinity(), true}
                     : ClampedFraction{proto.beta.fixed_value, proto.beta.fixed_value, false};
    }

    const auto cov = build_covariance(proto.modulation_variance_snu, transmittance, xi);
    r.mutual_info_bits = mutual_information(r.snr_linear, proto.detection);
    r.holevo_bits = holevo_bound(cov, proto.detection);
    r.delta_n_privacy_bits = delta_n_privacy(sec);
    r.skr_per_symbol_bits = (1.0 - r.fer.value) * r.beta.value * r.mutual_info_bits -
                            r.holevo_bits - r.delta_n_privacy_bits;
    r.skr_bps = proto.repetition_rate_hz * r.skr_per_symbol_bits;
    r.positive = r.skr_bps > 0.0;
    return r;
}

}  // namespace cvqkd::skr
