#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "../oracles/dv_monte_carlo.hpp"
#include "rqkd/dv_engine.hpp"

using namespace rqkd::dv;

namespace {

DvParams nominal(Source s = Source::wcp)
{
    DvParams p;
    p.source = s;
    return p;
}

}  // namespace

TEST_CASE("binary entropy")
{
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    using big = boost::multiprecision::cpp_bin_float_50;
    const big x("0.11");
    const big ref = -(x * log(x) + (1 - x) * log(1 - x)) / log(big(2));
    CHECK(binary_entropy(0.11) == doctest::Approx(ref.convert_to<double>()).epsilon(1e-14));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
}

TEST_CASE("observables in the limits")
{
    DvParams p = nominal();
    p.p_dc = 0.0;
    p.mu = 1e4;
    p.eta_ch = 1.0;
    auto o = channel_observables(p);
    CHECK(o.Q == doctest::Approx(1.0));
    CHECK(o.E == doctest::Approx(p.e_d));

    p = nominal();
    p.eta_ch = 0.0;
    o = channel_observables(p);
    CHECK(o.Q == doctest::Approx(1.0 - (1.0 - p.p_dc) * (1.0 - p.p_dc)).epsilon(1e-12));
    CHECK(o.E == doctest::Approx(0.5));

    p.p_dc = 0.0;
    CHECK(channel_observables(p).Q == 0.0);
    CHECK(channel_observables(p).E == 0.5);
}

TEST_CASE("observables against a tagged pulse simulation")
{
    for (Source s : {Source::wcp, Source::sps}) {
        DvParams p = nominal(s);
        p.eta_ch = 0.05;
        p.eta_ae = 0.2;
        p.p_dc = 1e-3;
        const auto o = channel_observables(p);
        const auto t = oracle::simulate_dv(p, 2'000'000, 42);
        CHECK(std::abs(t.rate(t.clicks) - o.Q) < 3.0 * t.sigma(t.clicks));
        const double e_mc = static_cast<double>(t.errors) / t.clicks;
        const double e_sigma = std::sqrt(e_mc * (1.0 - e_mc) / t.clicks);
        CHECK(std::abs(e_mc - o.E) < 3.0 * e_sigma);

        const auto b = photon_number_bounds(p);
        CHECK(std::abs(t.rate(t.eve_m0) - b.p0_eve) < 3.0 * t.sigma(t.eve_m0));
        CHECK(std::abs(t.rate(t.eve_n1m1) - b.p11) < 3.0 * t.sigma(t.eve_n1m1));
        const auto r = rate_breakdown(p, o);
        CHECK(r.s0_lower <= t.rate(t.clicks_m0) + 3.0 * t.sigma(t.clicks_m0));
        CHECK(r.s11_lower <= t.rate(t.clicks_n1m1) + 3.0 * t.sigma(t.clicks_n1m1));
    }
}

TEST_CASE("photon-number bounds")
{
    DvParams p = nominal(Source::sps);
    p.eta_ae = 0.3;
    auto b = photon_number_bounds(p);
    CHECK(b.p0_eve == doctest::Approx(0.7));
    CHECK(b.p11 == doctest::Approx(0.3));

    p = nominal();
    p.mu = 1.0;
    p.eta_ae = 0.0;
    b = photon_number_bounds(p);
    CHECK(b.p0_eve == 1.0);
    CHECK(b.p11 == 0.0);
}

TEST_CASE("photon-number bounds against the joint distribution summed term by term")
{
    using boost::math::binomial_coefficient;
    using boost::math::factorial;
    for (double eta_ae : {1e-4, 0.01, 0.3, 1.0})
        for (double mu : {0.1, 0.5, 3.0}) {
            DvParams p = nominal();
            p.mu = mu;
            p.eta_ae = eta_ae;
            // p_ij: i photons sent, j of them with Eve
            auto p_ij = [&](unsigned i, unsigned j) {
                return std::exp(-mu) * std::pow(mu, i) / factorial<double>(i) *
                       binomial_coefficient<double>(i, j) * std::pow(eta_ae, j) * std::pow(1.0 - eta_ae, i - j);
            };
            double p0 = 0.0;
            for (unsigned i = 0; i < 120; ++i)
                p0 += p_ij(i, 0);
            const auto b = photon_number_bounds(p);
            CHECK(b.p0_eve == doctest::Approx(p0).epsilon(1e-13));
            CHECK(b.p11 == doctest::Approx(p_ij(1, 1)).epsilon(1e-14));
        }
}

TEST_CASE("eta_ae = 1 gives the untagged bounds")
{
    for (double mu : {0.05, 0.5, 2.0})
        for (double eta_ch : {1e-3, 0.1, 0.9}) {
            DvParams p = nominal();
            p.mu = mu;
            p.eta_ch = eta_ch;
            const auto o = channel_observables(p);
            const auto r = rate_breakdown(p, o);
            CHECK(r.s0_lower == std::max(o.Q - (1.0 - std::exp(-mu)), 0.0));
            CHECK(r.s11_lower == std::max(o.Q - (1.0 - mu * std::exp(-mu)), 0.0));
        }
}

TEST_CASE("rate breakdown invariants")
{
    for (Source s : {Source::sps, Source::wcp})
        for (double eta_ae : {1e-6, 1e-4, 1e-3, 0.01, 0.5, 1.0})
            for (double mu : {0.01, 0.5, 5.0}) {
                DvParams p = nominal(s);
                p.eta_ae = eta_ae;
                p.mu = mu;
                const auto o = channel_observables(p);
                const auto r = rate_breakdown(p, o);
                CHECK(r.s0_lower >= 0.0);
                CHECK(r.s11_lower >= 0.0);
                CHECK(r.s0_lower + r.s11_lower <= o.Q * (1.0 + 1e-12));
                if (r.s11_lower > 0.0) {
                    CHECK(r.eps11_upper >= o.E);
                    CHECK(r.eps11_upper <= 0.5);
                } else {
                    CHECK(r.eps11_upper == 0.5);
                }
            }
}

TEST_CASE("WCP rate falls as Eve collects more")
{
    DvParams p = nominal();
    const auto o = channel_observables(p);
    double last = 1.0;
    for (double eta_ae = 1e-7; eta_ae <= 1.0; eta_ae *= 1.5) {
        p.eta_ae = eta_ae;
        const double r = restricted_rate(p, o);
        CHECK(r <= last + 1e-18);
        last = r;
    }
}

TEST_CASE("SPS reports the best of its three bounds")
{
    DvParams p = nominal(Source::sps);
    p.eta_ae = 0.3;
    const auto r = rate_breakdown(p, channel_observables(p));
    CHECK(r.rate == std::max({r.restricted, r.single_only, r.unrestricted}));
}

TEST_CASE("gain must be positive")
{
    DvParams p = nominal();
    CHECK_THROWS_AS(rate_breakdown(p, DvObservables{0.0, 0.5}), std::domain_error);
}

TEST_CASE("mu optimum grows as the restriction tightens")
{
    double last_mu = 0.0;
    for (double eta_ae : {1e-3, 5e-4, 1e-4, 1e-5}) {
        DvParams p = nominal();
        p.eta_ae = eta_ae;
        const auto m = optimize_mu(p);
        if (m.signed_rate > 0.0) {
            CHECK(m.mu_opt >= last_mu);  // saturates at the search ceiling
            last_mu = m.mu_opt;
        }
    }
    CHECK(last_mu > 1.0);
}

TEST_CASE("mu optimum beats the scan and any fixed intensity")
{
    DvParams p = nominal();
    p.eta_ae = 2e-4;
    const auto m = optimize_mu(p);
    REQUIRE(m.rate > 0.0);
    CHECK(m.rate == m.signed_rate);
    for (double mu : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        p.mu = mu;
        CHECK(restricted_rate(p, channel_observables(p)) <= m.signed_rate + 1e-15);
    }
}

TEST_CASE("no key without a restriction at 30 dB")
{
    DvParams p = nominal();
    p.eta_ae = 1.0;
    const auto m = optimize_mu(p);
    CHECK(m.signed_rate <= 0.0);
    CHECK(m.rate == 0.0);
}

TEST_CASE("parameter validation")
{
    DvParams p = nominal();
    CHECK_NOTHROW(p.validate());
    p.e_d = 0.7;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = nominal();
    p.f = 0.9;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS(optimize_mu(nominal(), MuSearch{1.0, 0.5, 200, 1e-6}));
    CHECK(parse_source("sps") == Source::sps);
    CHECK_FALSE(parse_source("pns"));
}
