#pragma once

// Secret key rates for Gaussian-modulated coherent-state CVQKD, in the
// asymptotic and finite-size regimes. All variances are in shot-noise units
// (vacuum quadrature variance = 1); rates are bits per symbol unless a
// repetition rate converts them to bits per second.

#include <optional>

#include "cvqkd/constants.hpp"

namespace cvqkd::skr {

enum class Detection { homodyne, heterodyne };
enum class Reconciliation { md, mlc_msd };

// Reconciliation efficiency: either the empirical SNR fit or a pinned value.
struct BetaMode {
    bool empirical = true;
    double fixed_value = 0.0;  // used when !empirical, must be in [0,1]

    static BetaMode empirical_fit() { return {true, 0.0}; }
    static BetaMode fixed(double value) { return {false, value}; }
};

struct ProtocolParams {
    double modulation_variance_snu = 5.0;   // V_A
    double excess_noise_snu = 0.03;         // xi
    Detection detection = Detection::heterodyne;
    Reconciliation reconciliation = Reconciliation::md;
    BetaMode beta = BetaMode::empirical_fit();
    double repetition_rate_hz = kDefaultRepetitionRateHz;

    void validate() const;  // throws validation_error
};

struct SecurityParams {
    int discretisation = 5;           // d
    double smoothing_eps = 2e-10;     // eps_s
    double security_eps = 1e-9;       // eps
    double block_size = 1e11;         // N, symbols per block
    // Fraction of symbols reserved for channel parameter estimation. Stored
    // for scenario bookkeeping; the finite-size rate formula does not use it.
    std::optional<double> estimation_fraction;

    void validate() const;
};

// Two-mode covariance matrix [[V*I, Z*sigma_z], [Z*sigma_z, W*I]].
struct CovarianceMatrix {
    double v;  // V = V_A + 1
    double w;  // W = 1 + T*V_A + T*xi
    double z;  // correlation coefficient

    // Physicality: V*W - Z^2 >= 1 (tolerance 1e-9), V >= 1, W >= 1.
    void validate() const;
};

struct SymplecticEigenvalues {
    double lambda1;  // >= lambda2
    double lambda2;
};

// Value clamped to [0,1]; `raw` keeps the unclamped fit for diagnostics.
struct ClampedFraction {
    double value;
    double raw;
    bool clamped;
};

struct SkrResult {
    double snr_linear;
    double snr_db;                 // -inf when T = 0
    ClampedFraction beta;
    ClampedFraction fer;
    double mutual_info_bits;       // I_AB, bits/symbol
    double holevo_bits;            // S_BE, bits/symbol
    double delta_n_privacy_bits;   // bits/symbol
    double skr_per_symbol_bits;    // may be negative, never floored
    double skr_bps;                // repetition_rate * skr_per_symbol
    bool positive;                 // skr_bps > 0
};

// Correlation coefficient for Gaussian modulation: Z = sqrt(T*(V_A^2 + 2 V_A)).
double correlation_coefficient_gm(double modulation_variance_snu, double transmittance);

CovarianceMatrix build_covariance(double modulation_variance_snu, double transmittance,
                                  double excess_noise_snu);

// SNR = T*V_A / (2 + T*xi).
double snr_linear(double modulation_variance_snu, double transmittance,
                  double excess_noise_snu);

// 10*log10 of the linear SNR; -infinity when the channel is dead (T = 0).
double snr_db(double modulation_variance_snu, double transmittance,
              double excess_noise_snu);

// I_AB: (1/2)*log2(1+SNR) for homodyne, log2(1+SNR) for heterodyne.
double mutual_information(double snr, Detection detection);

// g(x) = (x+1)*log2(x+1) - x*log2(x), with g(0) = 0 by the x*log x -> 0 limit.
double g_function(double x);

SymplecticEigenvalues symplectic_eigenvalues(const CovarianceMatrix& cov);

// Holevo bound S_BE = g((l1-1)/2) + g((l2-1)/2) - g((l3-1)/2).
// Negative results within 1e-9 of zero are float noise and clamp to 0;
// anything more negative is a computation error.
double holevo_bound(const CovarianceMatrix& cov, Detection detection);

// SKR_asy = beta*I_AB - S_BE. May be negative.
double skr_asymptotic(double beta, double mutual_info_bits, double holevo_bits);

// Empirical reconciliation efficiency beta(SNR_dB) = c1^(c2*s) - c3^(c4*s).
// Negative bases evaluate as sign(c)*|c|^e; the result is clamped to [0,1].
ClampedFraction beta_empirical(double snr_db, Reconciliation scheme);

// Empirical frame error rate (1/2)*[1 + m1*atan(m2*s + m3)], clamped to [0,1].
ClampedFraction fer_empirical(double snr_db);

// Finite-size privacy penalty, the four-term sum over sqrt(N).
double delta_n_privacy(const SecurityParams& sec);

// SKR_fin = f * [(1-FER)*beta*I_AB - S_BE - delta_n_privacy].
SkrResult skr_finite(const ProtocolParams& proto, const SecurityParams& sec,
                     double transmittance,
                     std::optional<double> excess_noise_override = std::nullopt);

}  // namespace cvqkd::skr
