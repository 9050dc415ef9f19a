#pragma once

#include <optional>
#include <string_view>

namespace rqkd::dv {

enum class Source { sps, wcp };

std::string_view to_string(Source source);
std::optional<Source> parse_source(std::string_view text);

/// BB84 link and post-processing parameters. Defaults are the nominal
/// 30 dB operating point.
struct DvParams {
    Source source = Source::wcp;
    double mu = 0.5;        // mean photon number (WCP only)
    double eta_ch = 1e-3;
    double eta_d = 0.9;
    double p_dc = 1e-7;     // dark/background click probability per detector
    double e_d = 0.01;      // misalignment error
    double f = 1.16;        // error-correction inefficiency
    double q = 1.0;         // basis-sifting factor
    double eta_ae = 1.0;

    double eta() const { return eta_ch * eta_d; }
    /// Throws std::invalid_argument naming the violated range.
    void validate() const;
};

struct DvObservables {
    double Q;  // gain
    double E;  // QBER
};

double binary_entropy(double x);

/// Gain and QBER. Dark clicks are random (error 1/2); signal clicks err
/// with probability e_d.
DvObservables channel_observables(const DvParams& p);

struct PhotonNumberBounds {
    double p0_eve;  // Eve receives no photon
    double p11;     // one photon sent, and Eve receives it
};

PhotonNumberBounds photon_number_bounds(const DvParams& p);

struct RateBreakdown {
    double s0_lower;
    double s11_lower;
    double eps11_upper;
    double restricted;    // bound with the S0 and S11 terms
    double single_only;   // SPS: all clicks treated as single photons, eps11 phase error
    double unrestricted;  // SPS: textbook single-photon rate with e1 = E
    double rate;          // reported lower bound
};

RateBreakdown rate_breakdown(const DvParams& p, const DvObservables& obs);

/// Asymptotic secret-key rate (bits/pulse). For SPS the best of the three
/// bounds in the breakdown; for WCP the restricted bound. Signed.
double restricted_rate(const DvParams& p, const DvObservables& obs);

struct MuSearch {
    double lo = 1e-4;
    double hi = 1e3;
    int scan_points = 200;
    double log_tol = 1e-6;
};

struct MuOptimum {
    double mu_opt;
    double rate;  // clamped at 0 when no intensity gives a key
    double signed_rate;
};

/// Maximizes restricted_rate over mu (channel_observables as the model):
/// log-spaced scan, then golden-section on log mu around the best sample.
MuOptimum optimize_mu(DvParams p, const MuSearch& search = {});

}  // namespace rqkd::dv
