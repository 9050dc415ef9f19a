#include "rqkd/dv_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rqkd/optimize.hpp"

namespace rqkd::dv {

namespace {

void require(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

}  // namespace

std::string_view to_string(Source source) { return source == Source::sps ? "sps" : "wcp"; }

std::optional<Source> parse_source(std::string_view text)
{
    if (text == "sps") return Source::sps;
    if (text == "wcp") return Source::wcp;
    return std::nullopt;
}

void DvParams::validate() const
{
    require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    require(eta_ch > 0.0 && eta_ch <= 1.0, "eta_ch must lie in (0, 1]");
    require(eta_d > 0.0 && eta_d <= 1.0, "eta_d must lie in (0, 1]");
    require(p_dc >= 0.0 && p_dc < 1.0, "p_dc must lie in [0, 1)");
    require(e_d >= 0.0 && e_d <= 0.5, "e_d must lie in [0, 0.5]");
    require(std::isfinite(f) && f >= 1.0, "f must be >= 1");
    require(q > 0.0 && q <= 1.0, "q must lie in (0, 1]");
    require(eta_ae > 0.0 && eta_ae <= 1.0, "eta_ae must lie in (0, 1]");
}

double binary_entropy(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x == 0.0 || x == 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

DvObservables channel_observables(const DvParams& p)
{
    const double no_dark = (1.0 - p.p_dc) * (1.0 - p.p_dc);
    double signal;
    double Q;
    if (p.source == Source::wcp) {
        // 1 - exp(-x) without cancellation at tiny eta*mu.
        signal = -std::expm1(-p.eta() * p.mu);
        Q = 1.0 - no_dark * std::exp(-p.eta() * p.mu);
    } else {
        signal = p.eta();
        Q = 1.0 - no_dark * (1.0 - p.eta());
    }
    const double eq = p.e_d * signal + 0.5 * (Q - signal);
    return {Q, Q > 0.0 ? eq / Q : 0.5};
}

PhotonNumberBounds photon_number_bounds(const DvParams& p)
{
    if (p.source == Source::sps)
        return {1.0 - p.eta_ae, p.eta_ae};
    return {std::exp(-p.mu * p.eta_ae), p.mu * p.eta_ae * std::exp(-p.mu)};
}

RateBreakdown rate_breakdown(const DvParams& p, const DvObservables& obs)
{
    if (!(obs.Q > 0.0))
        throw std::domain_error("rate_breakdown: gain must be positive");
    const PhotonNumberBounds b = photon_number_bounds(p);
    RateBreakdown r{};
    r.s0_lower = std::max(obs.Q - (1.0 - b.p0_eve), 0.0);
    r.s11_lower = std::max(obs.Q - (1.0 - b.p11), 0.0);
    r.eps11_upper = r.s11_lower > 0.0 ? std::min(obs.E * obs.Q / r.s11_lower, 0.5) : 0.5;

    const double ec = p.f * binary_entropy(obs.E);
    const double h_eps = binary_entropy(r.eps11_upper);
    r.restricted = p.q * obs.Q * (-ec + r.s11_lower / obs.Q * (1.0 - h_eps) + r.s0_lower / obs.Q);
    if (p.source == Source::sps) {
        r.single_only = p.q * obs.Q * (-ec + 1.0 - h_eps);
        r.unrestricted = p.q * obs.Q * (-ec + 1.0 - binary_entropy(obs.E));
        r.rate = std::max({r.restricted, r.single_only, r.unrestricted});
    } else {
        r.single_only = r.restricted;
        r.unrestricted = r.restricted;
        r.rate = r.restricted;
    }
    return r;
}

double restricted_rate(const DvParams& p, const DvObservables& obs)
{
    return rate_breakdown(p, obs).rate;
}

MuOptimum optimize_mu(DvParams p, const MuSearch& search)
{
    if (!(search.lo > 0.0 && search.hi > search.lo) || search.scan_points < 3)
        throw std::invalid_argument("optimize_mu: bad search interval");
    auto rate_at_log = [&](double log_mu) {
        p.mu = std::exp(log_mu);
        return restricted_rate(p, channel_observables(p));
    };

    const double a = std::log(search.lo);
    const double b = std::log(search.hi);
    const int n = search.scan_points;
    std::vector<double> grid(n);
    int best = 0;
    double best_rate = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        grid[i] = a + (b - a) * i / (n - 1);
        const double r = rate_at_log(grid[i]);
        if (r > best_rate) {
            best_rate = r;
            best = i;
        }
    }

    MuOptimum out{std::exp(grid[best]), 0.0, best_rate};
    if (best_rate > 0.0) {
        const double lo = grid[std::max(best - 1, 0)];
        const double hi = grid[std::min(best + 1, n - 1)];
        const auto refined = opt::golden_section_max(rate_at_log, lo, hi, search.log_tol);
        if (refined.value > best_rate) {
            out.mu_opt = std::exp(refined.x);
            out.signed_rate = refined.value;
        }
    }
    out.rate = std::max(out.signed_rate, 0.0);
    return out;
}

}  // namespace rqkd::dv
