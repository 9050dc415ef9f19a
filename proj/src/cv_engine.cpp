#include "rqkd/cv_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rqkd/optimize.hpp"

namespace rqkd::cv {

namespace {

void require(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

Eigen::Matrix2d z_matrix() { return Eigen::Vector2d(1.0, -1.0).asDiagonal(); }

double entropy_difference(const CovarianceMatrix& before, const CovarianceMatrix& after)
{
    return gaussian::von_neumann_entropy(before) - gaussian::von_neumann_entropy(after);
}

}  // namespace

void ChannelObservation::validate() const
{
    require(std::isfinite(t_eq) && t_eq > 0.0 && t_eq <= 1.0, "t_eq must lie in (0, 1]");
    require(std::isfinite(xi) && xi >= 0.0, "xi must be >= 0");
    require(std::isfinite(eta_d) && eta_d > 0.0 && eta_d <= 1.0, "eta_d must lie in (0, 1]");
    require(std::isfinite(nu_el) && nu_el >= 0.0, "nu_el must be >= 0");
    require(t_eq <= eta_d, "t_eq must not exceed eta_d");
}

void CvScenario::validate() const
{
    require(eta_ae > 0.0 && eta_ae <= 1.0, "eta_ae must lie in (0, 1]");
    require(in_unit(eta_s), "eta_s must lie in [0, 1]");
    require(in_unit(eta_t), "eta_t must lie in [0, 1]");
    require(std::isfinite(V) && V > 1.0, "V must be > 1");
    require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    require(std::isfinite(v_s) && v_s >= 1.0, "v_s must be >= 1");
}

std::string_view to_string(Mode mode)
{
    switch (mode) {
    case Mode::rr: return "rr";
    case Mode::dr_m1: return "dr-m1";
    case Mode::dr_m2: return "dr-m2";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text)
{
    if (text == "rr") return Mode::rr;
    if (text == "dr-m1") return Mode::dr_m1;
    if (text == "dr-m2") return Mode::dr_m2;
    return std::nullopt;
}

double network_transmissivity(double eta_ae, double eta_s, double eta_t, double eta_e)
{
    const double amp = std::sqrt(eta_ae * eta_e * eta_t) + std::sqrt((1.0 - eta_ae) * eta_s * (1.0 - eta_t));
    return amp * amp;
}

AttackSolution solve_attack(const CvScenario& s, const ChannelObservation& obs)
{
    const double t = obs.eta_ch();
    AttackSolution out;
    const double direct = s.eta_ae * s.eta_t;
    const double amp = std::sqrt(t) - std::sqrt((1.0 - s.eta_ae) * s.eta_s * (1.0 - s.eta_t));
    if (amp < 0.0 || direct <= 0.0)
        return out;
    out.eta_e = amp * amp / direct;
    if (out.eta_e > 1.0)
        return out;
    const double leak = (1.0 - out.eta_e) * s.eta_t;
    if (obs.xi > 0.0) {
        if (leak <= 0.0)
            return out;
        out.v_e = 1.0 + t * obs.xi / leak;
    } else {
        out.v_e = 1.0;
    }
    out.feasible = out.v_e <= kMaxEveVariance;
    return out;
}

CovarianceMatrix build_cm(const CvScenario& s, const AttackSolution& attack)
{
    if (!attack.feasible)
        throw std::invalid_argument("build_cm: attack is infeasible");
    const double V = s.V;
    const double ee = attack.eta_e;
    const double ve = attack.v_e;
    const double c = std::sqrt(V * V - 1.0);
    const double ce = std::sqrt(ve * ve - 1.0);
    const double t = network_transmissivity(s.eta_ae, s.eta_s, s.eta_t, ee);
    const double xi_rx = (1.0 - ee) * s.eta_t * (ve - 1.0);
    const double at_eve = s.eta_ae * (V - 1.0) + 1.0;

    const double c_ab = std::sqrt(t) * c;
    const double c_aep = -std::sqrt(s.eta_ae * (1.0 - ee)) * c;
    const double v_b = t * (V - 1.0) + 1.0 + xi_rx + (1.0 - s.eta_s) * (1.0 - s.eta_t) * (s.v_s - 1.0);
    const double c_be = std::sqrt((1.0 - ee) * s.eta_t) * ce;
    const double c_bep = std::sqrt(ee * (1.0 - ee) * s.eta_t) * (ve - at_eve) -
                         std::sqrt(s.eta_ae * (1.0 - s.eta_ae) * (1.0 - ee) * s.eta_s * (1.0 - s.eta_t)) * (V - 1.0);
    const double c_eep = std::sqrt(ee) * ce;
    const double v_ep = (1.0 - ee) * at_eve + ee * ve;

    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d Z = z_matrix();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
    auto put = [&](int i, int j, const Eigen::Matrix2d& b) {
        m.block<2, 2>(2 * i, 2 * j) = b;
        if (i != j)
            m.block<2, 2>(2 * j, 2 * i) = b.transpose();
    };
    put(0, 0, V * I);
    put(0, 1, c_ab * Z);
    put(0, 3, c_aep * Z);
    put(1, 1, v_b * I);
    put(1, 2, c_be * Z);
    put(1, 3, c_bep * I);
    put(2, 2, ve * I);
    put(2, 3, c_eep * Z);
    put(3, 3, v_ep * I);
    return CovarianceMatrix(std::move(m));
}

double mutual_info(const ChannelObservation& obs, double V)
{
    const double eta_ch = obs.eta_ch();
    if (!(eta_ch > 0.0))
        throw std::domain_error("mutual_info: channel transmissivity must be positive");
    const double chi_line = (1.0 - eta_ch) / eta_ch + obs.xi;
    const double chi_hom = (1.0 - obs.eta_d) / obs.eta_d + obs.nu_el / obs.eta_d;
    const double chi_tot = chi_line + chi_hom / eta_ch;
    return 0.5 * std::log2((V + chi_tot) / (1.0 + chi_tot));
}

double holevo_rr(const CovarianceMatrix& abee)
{
    const CovarianceMatrix bee = abee.reduced({1, 2, 3});
    return entropy_difference(bee.reduced({1, 2}),
                              gaussian::condition_on_homodyne(bee, 0, gaussian::Quadrature::x));
}

double holevo_rr(const CovarianceMatrix& abee, double eta_d, double nu_el)
{
    if (eta_d == 1.0 && nu_el == 0.0)
        return holevo_rr(abee);
    // Bob records sqrt(eta_d) x_B plus independent noise of variance
    // 1 - eta_d + nu_el.
    const CovarianceMatrix ee = abee.reduced({2, 3});
    Eigen::Vector4d coupling;
    for (int k = 0; k < 4; ++k)
        coupling(k) = std::sqrt(eta_d) * abee(4 + k, 2);
    const double v_meas = eta_d * abee(2, 2) + 1.0 - eta_d + nu_el;
    const CovarianceMatrix cond(ee.matrix() - coupling * coupling.transpose() / v_meas);
    return entropy_difference(ee, cond);
}

CovarianceMatrix build_axee_cm(const CovarianceMatrix& abee)
{
    const double V = abee(0, 0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    m.topLeftCorner<2, 2>() = 0.5 * (V + 1.0) * Eigen::Matrix2d::Identity();
    m.bottomRightCorner<4, 4>() = abee.reduced({2, 3}).matrix();
    // Alice's E' coupling survives the 50:50 split scaled by 1/sqrt(2); her
    // E coupling is zero in the network.
    const Eigen::Matrix2d a_ep = abee.block(0, 3) / std::numbers::sqrt2;
    m.block<2, 2>(0, 4) = a_ep;
    m.block<2, 2>(4, 0) = a_ep.transpose();
    return CovarianceMatrix(std::move(m));
}

double holevo_dr_m1(const CovarianceMatrix& axee)
{
    return entropy_difference(axee.reduced({1, 2}),
                              gaussian::condition_on_homodyne(axee, 0, gaussian::Quadrature::x));
}

double holevo_dr_m2_bound(double eta_ae, double V)
{
    if (!(eta_ae >= 0.0 && eta_ae <= 1.0) || !(V >= 1.0))
        throw std::domain_error("holevo_dr_m2_bound: need 0 <= eta_ae <= 1 and V >= 1");
    const double vb = eta_ae * (V - 1.0) + 1.0;
    return gaussian::g_func(vb) - gaussian::g_func(std::sqrt(vb));
}

PointResult key_rate_point(const CvScenario& s, const ChannelObservation& obs, Mode mode)
{
    PointResult out;
    out.i_ab = mutual_info(obs, s.V);
    if (mode == Mode::dr_m2) {
        out.chi = holevo_dr_m2_bound(s.eta_ae, s.V);
        out.rate = s.beta * out.i_ab - out.chi;
        return out;
    }
    out.attack = solve_attack(s, obs);
    if (!out.attack.feasible)
        return out;
    const CovarianceMatrix abee = build_cm(s, out.attack);
    out.chi = mode == Mode::rr ? holevo_rr(abee, obs.eta_d, obs.nu_el)
                               : holevo_dr_m1(build_axee_cm(abee));
    out.rate = s.beta * out.i_ab - out.chi;
    return out;
}

std::optional<Interval> feasible_eta_t(double eta_ae, double eta_s, double t)
{
    // sqrt(t) = sqrt(a eta_t eta_e) + sqrt(b (1 - eta_t)) with eta_e in [0,1].
    const double a = eta_ae;
    const double b = (1.0 - eta_ae) * eta_s;
    if (t > a + b)
        return std::nullopt;
    Interval iv{0.0, 1.0};
    if (b > 0.0)
        iv.lo = std::max(iv.lo, 1.0 - t / b);
    // With eta_t = sin^2(phi): sqrt(a) sin(phi) + sqrt(b) cos(phi)
    //   = sqrt(a + b) sin(phi + psi) must reach sqrt(t).
    const double r = std::min(1.0, std::sqrt(t / (a + b)));
    const double psi = std::atan2(std::sqrt(b), std::sqrt(a));
    const double phi1 = std::max(std::asin(r) - psi, 0.0);
    const double phi2 = std::min(std::numbers::pi - std::asin(r) - psi, std::numbers::pi / 2.0);
    if (phi1 > phi2)
        return std::nullopt;
    iv.lo = std::max(iv.lo, std::pow(std::sin(phi1), 2));
    iv.hi = std::min(iv.hi, std::pow(std::sin(phi2), 2));
    if (iv.lo > iv.hi)
        return std::nullopt;
    return iv;
}

WorstCase worst_case_rate(const CvScenario& base, const ChannelObservation& obs, Mode mode,
                          const GridSpec& grid)
{
    if (grid.n_eta_s < 2 || grid.n_eta_t < 2)
        throw std::invalid_argument("worst_case_rate: grid needs at least 2 points per axis");

    WorstCase out;
    CvScenario s = base;
    s.eta_s = 0.0;
    s.eta_t = 1.0;
    const PointResult at_b = key_rate_point(s, obs, mode);
    out.rate_b = at_b.rate;

    if (mode == Mode::dr_m2) {
        // The generic bound does not depend on the unknown parameters.
        out.rate_a = *at_b.rate;
        out.feasible_points = grid.n_eta_s * grid.n_eta_t;
        return out;
    }

    const double t = obs.eta_ch();
    auto eval = [&](double es, double u, double* eta_t_out) -> double {
        if (!(es >= 0.0 && es <= 1.0 && u >= 0.0 && u <= 1.0))
            return std::numeric_limits<double>::infinity();
        const auto iv = feasible_eta_t(base.eta_ae, es, t);
        if (!iv)
            return std::numeric_limits<double>::infinity();
        CvScenario p = base;
        p.eta_s = es;
        p.eta_t = iv->lo + u * (iv->hi - iv->lo);
        if (eta_t_out)
            *eta_t_out = p.eta_t;
        const PointResult r = key_rate_point(p, obs, mode);
        return r.rate ? *r.rate : std::numeric_limits<double>::infinity();
    };

    struct Sample {
        double value, es, u;
    };
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(grid.n_eta_s) * grid.n_eta_t);
    for (int i = 0; i < grid.n_eta_s; ++i) {
        const double es = static_cast<double>(i) / (grid.n_eta_s - 1);
        for (int j = 0; j < grid.n_eta_t; ++j) {
            const double u = static_cast<double>(j) / (grid.n_eta_t - 1);
            const double v = eval(es, u, nullptr);
            if (std::isfinite(v))
                samples.push_back({v, es, u});
        }
    }
    // The closed-bypass point is always worth a look even when the grid
    // happens not to land on it.
    if (at_b.rate)
        samples.push_back({*at_b.rate, 0.0, 1.0});

    if (samples.empty()) {
        std::ostringstream msg;
        msg << "worst_case_rate: no feasible (eta_s, eta_t) for eta_ae=" << base.eta_ae
            << ", eta_ch=" << t << ", xi=" << obs.xi;
        throw std::domain_error(msg.str());
    }
    out.feasible_points = static_cast<int>(samples.size());
    std::stable_sort(samples.begin(), samples.end(),
                     [](const Sample& a, const Sample& b) { return a.value < b.value; });

    Sample best = samples.front();
    const int starts = std::min<int>(grid.refine_starts, static_cast<int>(samples.size()));
    opt::NelderMeadOptions nm;
    nm.initial_step = 0.5 / std::max(grid.n_eta_s, grid.n_eta_t);
    for (int k = 0; k < starts; ++k) {
        const auto res = opt::nelder_mead(
            [&](const std::vector<double>& x) { return eval(x[0], x[1], nullptr); },
            {samples[k].es, samples[k].u}, nm);
        if (res.value < best.value)
            best = {res.value, res.x[0], res.x[1]};
    }

    double eta_t = 1.0;
    eval(best.es, best.u, &eta_t);
    out.rate_a = best.value;
    out.argmin_eta_s = best.es;
    out.argmin_eta_t = eta_t;
    return out;
}

}  // namespace rqkd::cv
