#include "rqkd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#ifndef RQKD_VERSION
#define RQKD_VERSION "dev"
#endif

namespace rqkd::scenario {

using io::Cell;

namespace {

constexpr std::string_view kModeNames[] = {"cv-rr",  "cv-dr-m1", "cv-dr-m2",     "dv-sps",
                                           "dv-wcp", "lidar-profile", "lidar-elevation"};

bool is_cv(Mode m) { return m == Mode::cv_rr || m == Mode::cv_dr_m1 || m == Mode::cv_dr_m2; }
bool is_dv(Mode m) { return m == Mode::dv_sps || m == Mode::dv_wcp; }

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(std::string_view text)
{
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw std::invalid_argument("expected a finite number, got '" + std::string(text) + "'");
    return v;
}

int parse_int(std::string_view text)
{
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view text)
{
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

ParamSpec real_param(std::string section, std::string key, std::function<double&(Config&)> ref)
{
    ParamSpec p;
    p.section = std::move(section);
    p.key = std::move(key);
    p.set = [ref](Config& c, std::string_view v) { ref(c) = parse_real(v); };
    p.get = [ref](const Config& c) { return io::format_number(ref(const_cast<Config&>(c))); };
    p.real = [ref](Config& c) { return &ref(c); };
    return p;
}

ParamSpec int_param(std::string section, std::string key, std::function<int&(Config&)> ref)
{
    ParamSpec p;
    p.section = std::move(section);
    p.key = std::move(key);
    p.set = [ref](Config& c, std::string_view v) { ref(c) = parse_int(v); };
    p.get = [ref](const Config& c) { return std::to_string(ref(const_cast<Config&>(c))); };
    return p;
}

ParamSpec bool_param(std::string section, std::string key, std::function<bool&(Config&)> ref)
{
    ParamSpec p;
    p.section = std::move(section);
    p.key = std::move(key);
    p.set = [ref](Config& c, std::string_view v) { ref(c) = parse_bool(v); };
    p.get = [ref](const Config& c) { return std::string(ref(const_cast<Config&>(c)) ? "true" : "false"); };
    return p;
}

std::vector<ParamSpec> build_registry()
{
    std::vector<ParamSpec> r;
    // [cv]
    r.push_back(real_param("cv", "t_eq", [](Config& c) -> double& { return c.cv_obs.t_eq; }));
    r.push_back(real_param("cv", "xi", [](Config& c) -> double& { return c.cv_obs.xi; }));
    r.push_back(real_param("cv", "eta_d", [](Config& c) -> double& { return c.cv_obs.eta_d; }));
    r.push_back(real_param("cv", "nu_el", [](Config& c) -> double& { return c.cv_obs.nu_el; }));
    r.push_back(real_param("cv", "eta_ae", [](Config& c) -> double& { return c.cv_scenario.eta_ae; }));
    r.push_back(real_param("cv", "eta_s", [](Config& c) -> double& { return c.cv_scenario.eta_s; }));
    r.push_back(real_param("cv", "eta_t", [](Config& c) -> double& { return c.cv_scenario.eta_t; }));
    r.push_back(real_param("cv", "V", [](Config& c) -> double& { return c.cv_scenario.V; }));
    r.push_back(real_param("cv", "beta", [](Config& c) -> double& { return c.cv_scenario.beta; }));
    r.push_back(real_param("cv", "v_s", [](Config& c) -> double& { return c.cv_scenario.v_s; }));
    r.push_back(int_param("cv", "grid_eta_s", [](Config& c) -> int& { return c.cv_grid.n_eta_s; }));
    r.push_back(int_param("cv", "grid_eta_t", [](Config& c) -> int& { return c.cv_grid.n_eta_t; }));
    r.push_back(int_param("cv", "refine_starts", [](Config& c) -> int& { return c.cv_grid.refine_starts; }));
    {
        ParamSpec p;
        p.section = "cv";
        p.key = "evaluation";
        p.set = [](Config& c, std::string_view v) {
            if (v == "worst-case")
                c.cv_evaluation = CvEvaluation::worst_case;
            else if (v == "point")
                c.cv_evaluation = CvEvaluation::point;
            else
                throw std::invalid_argument("expected worst-case or point, got '" + std::string(v) + "'");
        };
        p.get = [](const Config& c) {
            return std::string(c.cv_evaluation == CvEvaluation::point ? "point" : "worst-case");
        };
        r.push_back(std::move(p));
    }
    // [dv]
    r.push_back(real_param("dv", "mu", [](Config& c) -> double& { return c.dv.mu; }));
    r.push_back(real_param("dv", "eta_ch", [](Config& c) -> double& { return c.dv.eta_ch; }));
    r.push_back(real_param("dv", "eta_d", [](Config& c) -> double& { return c.dv.eta_d; }));
    r.push_back(real_param("dv", "p_dc", [](Config& c) -> double& { return c.dv.p_dc; }));
    r.push_back(real_param("dv", "e_d", [](Config& c) -> double& { return c.dv.e_d; }));
    r.push_back(real_param("dv", "f", [](Config& c) -> double& { return c.dv.f; }));
    r.push_back(real_param("dv", "q", [](Config& c) -> double& { return c.dv.q; }));
    r.push_back(real_param("dv", "eta_ae", [](Config& c) -> double& { return c.dv.eta_ae; }));
    r.push_back(bool_param("dv", "optimize_mu", [](Config& c) -> bool& { return c.dv_optimize_mu; }));
    r.push_back(real_param("dv", "mu_lo", [](Config& c) -> double& { return c.mu_search.lo; }));
    r.push_back(real_param("dv", "mu_hi", [](Config& c) -> double& { return c.mu_search.hi; }));
    r.push_back(int_param("dv", "mu_scan_points", [](Config& c) -> int& { return c.mu_search.scan_points; }));
    r.push_back(real_param("dv", "mu_log_tol", [](Config& c) -> double& { return c.mu_search.log_tol; }));
    // [link]
    r.push_back(real_param("link", "L", [](Config& c) -> double& { return c.monitor.geom.L; }));
    r.push_back(real_param("link", "r_a", [](Config& c) -> double& { return c.monitor.geom.r_a; }));
    r.push_back(real_param("link", "r_b", [](Config& c) -> double& { return c.monitor.geom.r_b; }));
    r.push_back(real_param("link", "altitude", [](Config& c) -> double& { return c.altitude; }));
    // [lidar]
    r.push_back(real_param("lidar", "lambda", [](Config& c) -> double& { return c.monitor.lambda; }));
    r.push_back(real_param("lidar", "m2", [](Config& c) -> double& { return c.monitor.m2; }));
    r.push_back(real_param("lidar", "p_t_sat", [](Config& c) -> double& { return c.monitor.p_t_sat; }));
    r.push_back(real_param("lidar", "p_t_ground", [](Config& c) -> double& { return c.monitor.p_t_ground; }));
    r.push_back(real_param("lidar", "kappa", [](Config& c) -> double& { return c.monitor.kappa; }));
    r.push_back(real_param("lidar", "alpha", [](Config& c) -> double& { return c.monitor.alpha; }));
    r.push_back(int_param("lidar", "profile_points", [](Config& c) -> int& { return c.profile_points; }));
    // [background]
    r.push_back(real_param("background", "albedo_earth", [](Config& c) -> double& { return c.monitor.background.albedo_earth; }));
    r.push_back(real_param("background", "albedo_moon", [](Config& c) -> double& { return c.monitor.background.albedo_moon; }));
    r.push_back(real_param("background", "moon_radius", [](Config& c) -> double& { return c.monitor.background.moon_radius; }));
    r.push_back(real_param("background", "earth_moon", [](Config& c) -> double& { return c.monitor.background.earth_moon; }));
    r.push_back(real_param("background", "sun_irradiance", [](Config& c) -> double& { return c.monitor.background.sun_irradiance; }));
    r.push_back(real_param("background", "sky_radiance", [](Config& c) -> double& { return c.monitor.background.sky_radiance; }));
    r.push_back(real_param("background", "filter_nm", [](Config& c) -> double& { return c.monitor.background.filter_nm; }));
    r.push_back(real_param("background", "fov_sr", [](Config& c) -> double& { return c.monitor.background.fov_sr; }));
    // [losses]
    r.push_back(real_param("losses", "extinction_beta", [](Config& c) -> double& { return c.monitor.losses.extinction_beta; }));
    r.push_back(real_param("losses", "detection", [](Config& c) -> double& { return c.monitor.losses.detection; }));
    r.push_back(real_param("losses", "optics", [](Config& c) -> double& { return c.monitor.losses.optics; }));
    // [radar]
    r.push_back(real_param("radar", "p_t", [](Config& c) -> double& { return c.radar.p_t; }));
    r.push_back(real_param("radar", "r_ant", [](Config& c) -> double& { return c.radar.r_ant; }));
    r.push_back(real_param("radar", "lambda", [](Config& c) -> double& { return c.radar.lambda; }));
    r.push_back(real_param("radar", "efficiency", [](Config& c) -> double& { return c.radar.efficiency; }));
    r.push_back(real_param("radar", "noise_figure_db", [](Config& c) -> double& { return c.radar.noise_figure_db; }));
    r.push_back(real_param("radar", "bandwidth", [](Config& c) -> double& { return c.radar.bandwidth; }));
    r.push_back(real_param("radar", "kappa_db", [](Config& c) -> double& { return c.radar.kappa_db; }));
    r.push_back(real_param("radar", "temperature", [](Config& c) -> double& { return c.radar.temperature; }));
    return r;
}

const ParamSpec* find_param(std::string_view section, std::string_view key)
{
    for (const auto& p : parameter_registry())
        if (p.section == section && p.key == key)
            return &p;
    return nullptr;
}

ScenarioError validation_error(const std::string& origin, const std::string& key, const std::string& what)
{
    return ScenarioError(ScenarioError::Kind::validation, origin, 0, key, what);
}

/// Config with the sweep variable set to `value`.
Config at_point(const Config& cfg, double value)
{
    Config c = cfg;
    if (is_cv(c.mode) || is_dv(c.mode)) {
        const ParamSpec* p = find_param(is_cv(c.mode) ? "cv" : "dv", c.sweep.variable);
        *p->real(c) = value;
    }
    return c;
}

void check(bool ok, const std::string& origin, const std::string& key, const std::string& what)
{
    if (!ok)
        throw validation_error(origin, key, what);
}

void validate_point(const Config& c, double value, const std::string& origin)
{
    try {
        if (is_cv(c.mode)) {
            c.cv_scenario.validate();
            c.cv_obs.validate();
            check(c.cv_grid.n_eta_s >= 2 && c.cv_grid.n_eta_t >= 2, origin, "cv.grid_eta_s",
                  "grid sizes must be >= 2");
            check(c.cv_grid.refine_starts >= 0, origin, "cv.refine_starts", "must be >= 0");
        } else if (is_dv(c.mode)) {
            c.dv.validate();
            check(c.mu_search.lo > 0.0 && c.mu_search.hi > c.mu_search.lo, origin, "dv.mu_lo",
                  "need 0 < mu_lo < mu_hi");
            check(c.mu_search.scan_points >= 3, origin, "dv.mu_scan_points", "must be >= 3");
            check(c.mu_search.log_tol > 0.0, origin, "dv.mu_log_tol", "must be > 0");
        } else {
            const auto& m = c.monitor;
            check(m.geom.L > 0.0, origin, "link.L", "must be > 0");
            check(m.geom.r_a > 0.0 && m.geom.r_b > 0.0, origin, "link.r_a", "aperture radii must be > 0");
            check(c.altitude > 0.0, origin, "link.altitude", "must be > 0");
            check(m.lambda > 0.0, origin, "lidar.lambda", "must be > 0");
            check(m.m2 >= 1.0, origin, "lidar.m2", "must be >= 1");
            check(m.p_t_sat > 0.0 && m.p_t_ground > 0.0, origin, "lidar.p_t_sat", "powers must be > 0");
            check(m.kappa > 0.0 && m.kappa <= 1.0, origin, "lidar.kappa", "must lie in (0, 1]");
            check(m.alpha > 0.0 && m.alpha <= 1.0, origin, "lidar.alpha", "must lie in (0, 1]");
            check(c.profile_points >= 2, origin, "lidar.profile_points", "must be >= 2");
            const auto& b = m.background;
            for (double x : {b.albedo_earth, b.albedo_moon, b.moon_radius, b.earth_moon, b.sun_irradiance,
                             b.sky_radiance, b.filter_nm, b.fov_sr})
                check(x >= 0.0, origin, "background", "values must be >= 0");
            check(c.radar.p_t > 0.0 && c.radar.r_ant > 0.0 && c.radar.lambda > 0.0 && c.radar.efficiency > 0.0 &&
                      c.radar.bandwidth > 0.0 && c.radar.temperature > 0.0,
                  origin, "radar", "radar parameters must be > 0");
            if (c.mode == Mode::lidar_profile)
                check(value > 0.0 && value < m.geom.L, origin, "sweep.start", "z must lie in (0, L)");
            else
                check(value >= 0.0 && value < 90.0, origin, "sweep.start", "theta_deg must lie in [0, 90)");
        }
    } catch (const std::invalid_argument& e) {
        throw validation_error(origin, c.sweep.variable, e.what());
    }
}

std::vector<Cell> eval_cv(const Config& c, double x)
{
    const cv::Mode mode = c.mode == Mode::cv_rr      ? cv::Mode::rr
                          : c.mode == Mode::cv_dr_m1 ? cv::Mode::dr_m1
                                                     : cv::Mode::dr_m2;
    if (c.cv_evaluation == CvEvaluation::point) {
        const auto r = cv::key_rate_point(c.cv_scenario, c.cv_obs, mode);
        const double denom = (1.0 - c.cv_scenario.eta_ae) * (1.0 - c.cv_scenario.eta_t);
        const Cell eta_s_max = denom > 0.0 ? Cell(std::min(1.0, c.cv_obs.eta_ch() / denom)) : Cell();
        if (!r.rate)
            return {x, {}, {}, {}, r.i_ab, {}, {}, eta_s_max, 0.0};
        const bool attack = mode != cv::Mode::dr_m2;
        return {x,
                *r.rate,
                std::max(*r.rate, 0.0),
                r.chi,
                r.i_ab,
                attack ? Cell(r.attack.eta_e) : Cell(),
                attack ? Cell(r.attack.v_e) : Cell(),
                eta_s_max,
                1.0};
    }
    try {
        const auto w = cv::worst_case_rate(c.cv_scenario, c.cv_obs, mode, c.cv_grid);
        Cell kb;
        Cell kb_clamped;
        if (w.rate_b) {
            kb = *w.rate_b;
            kb_clamped = std::max(*w.rate_b, 0.0);
        }
        return {x, w.rate_a, std::max(w.rate_a, 0.0), kb, kb_clamped, w.argmin_eta_s, w.argmin_eta_t, 1.0};
    } catch (const std::domain_error&) {
        return {x, {}, {}, {}, {}, {}, {}, 0.0};
    }
}

std::vector<Cell> eval_dv(const Config& c, double x)
{
    dv::DvParams sps = c.dv;
    sps.source = dv::Source::sps;
    const auto sps_obs = dv::channel_observables(sps);
    const auto sps_rate = dv::rate_breakdown(sps, sps_obs);
    if (c.mode == Mode::dv_sps)
        return {x,
                sps_rate.rate,
                std::max(sps_rate.rate, 0.0),
                sps_rate.restricted,
                sps_rate.single_only,
                sps_rate.unrestricted,
                sps_obs.Q,
                sps_obs.E};

    dv::DvParams wcp = c.dv;
    wcp.source = dv::Source::wcp;
    double rate;
    if (c.dv_optimize_mu) {
        const auto best = dv::optimize_mu(wcp, c.mu_search);
        wcp.mu = best.mu_opt;
        rate = best.signed_rate;
    } else {
        rate = dv::restricted_rate(wcp, dv::channel_observables(wcp));
    }
    const auto obs = dv::channel_observables(wcp);
    return {x, rate, std::max(rate, 0.0), wcp.mu, sps_rate.rate, std::max(sps_rate.rate, 0.0), obs.Q, obs.E};
}

/// Minimum-size estimate from the radar equation fed with LIDAR optics, the
/// comparison curve for the Gaussian-optics bound.
double lidar_radar_equation_radius(double d, const lidar::LidarConfig& cfg)
{
    lidar::RadarParams r;
    r.p_t = cfg.p_t;
    r.r_ant = cfg.beam.w0;
    r.lambda = cfg.beam.lambda;
    r.efficiency = 1.0;
    r.kappa_db = 10.0 * std::log10(cfg.kappa);
    const double g = r.gain();
    const double sigma = cfg.p_min * std::pow(4.0 * std::numbers::pi, 3) * cfg.kappa * std::pow(d, 4) /
                         (cfg.p_t * g * g * r.lambda * r.lambda);
    return lidar::sphere_radius(sigma);
}

std::vector<Cell> eval_lidar_profile(const Config& c, double z)
{
    const auto sat = c.monitor.satellite_config();
    const auto ground = c.monitor.ground_config();
    const auto p = lidar::profile_at(z, c.monitor.geom, sat, ground);
    const double L = c.monitor.geom.L;
    const auto a = lidar::lidar_size_bound(z, sat);
    const auto b = lidar::lidar_size_bound(L - z, ground);
    const double radar = lidar::sphere_radius(lidar::radar_cross_section_bound(L - z, c.radar));
    const double lidar_eq =
        std::min(lidar_radar_equation_radius(z, sat), lidar_radar_equation_radius(L - z, ground));
    return {z,
            p.r_e,
            p.eta_ae,
            p.eta_eb,
            p.w_a,
            p.r_e ? Cell(p.w_e) : Cell(),
            a ? Cell(*a) : Cell(),
            b ? Cell(*b) : Cell(),
            lidar_eq,
            radar,
            p.r_e ? 1.0 : 0.0};
}

std::vector<Cell> eval_lidar_elevation(const Config& c, double theta_deg)
{
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const auto e = lidar::elevation_sweep(c.altitude, c.monitor, {theta}, c.profile_points).front();
    return {theta_deg, e.distance, e.max_eta_ae, e.max_eta_eb, e.eta_ab_diffraction, e.eta_ab_total, e.alpha_min};
}

std::vector<std::string> columns_for(const Config& c)
{
    const std::string& x = c.sweep.variable;
    if (is_cv(c.mode)) {
        if (c.cv_evaluation == CvEvaluation::point)
            return {x, "K", "K_clamped", "chi", "I_AB", "eta_e", "V_E", "eta_s_max", "feasible"};
        return {x, "K_a", "K_a_clamped", "K_b", "K_b_clamped", "argmin_eta_s", "argmin_eta_t", "feasible"};
    }
    if (c.mode == Mode::dv_sps)
        return {x, "R_sps", "R_sps_clamped", "R_restricted", "R_single", "R_unrestricted", "Q", "E"};
    if (c.mode == Mode::dv_wcp)
        return {x, "R_wcp", "R_wcp_clamped", "mu_opt", "R_sps", "R_sps_clamped", "Q", "E"};
    if (c.mode == Mode::lidar_profile)
        return {x,   "r_e",     "eta_ae",       "eta_eb",       "w_a",    "w_e",
                "r_e_sat", "r_e_ground", "r_e_radar_eq", "r_e_radar", "bounded"};
    return {x, "distance", "max_eta_ae", "max_eta_eb", "eta_ab_diffraction", "eta_ab_total", "alpha_min"};
}

std::vector<Cell> eval_point(const Config& cfg, double value)
{
    const Config c = at_point(cfg, value);
    if (is_cv(c.mode))
        return eval_cv(c, value);
    if (is_dv(c.mode))
        return eval_dv(c, value);
    if (c.mode == Mode::lidar_profile)
        return eval_lidar_profile(c, value);
    return eval_lidar_elevation(c, value);
}

}  // namespace

std::string_view to_string(Mode mode) { return kModeNames[static_cast<int>(mode)]; }

std::optional<Mode> parse_mode(std::string_view text)
{
    for (int i = 0; i < 7; ++i)
        if (kModeNames[i] == text)
            return static_cast<Mode>(i);
    return std::nullopt;
}

std::vector<double> Sweep::values() const
{
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
        const double t = points > 1 ? static_cast<double>(i) / (points - 1) : 0.0;
        if (scale == Scale::log)
            v[i] = std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
        else
            v[i] = start + t * (stop - start);
    }
    // Land exactly on the requested endpoints.
    if (points > 0)
        v.front() = start;
    if (points > 1)
        v.back() = stop;
    return v;
}

ScenarioError::ScenarioError(Kind kind, std::string origin, int line, std::string key, const std::string& what)
    : std::runtime_error([&] {
          std::ostringstream s;
          s << origin;
          if (line > 0)
              s << ':' << line;
          s << ": " << (kind == Kind::parse ? "parse error" : "invalid scenario");
          if (!key.empty())
              s << " [" << key << "]";
          s << ": " << what;
          return s.str();
      }()),
      kind_(kind),
      line_(line),
      key_(std::move(key))
{
}

const std::vector<ParamSpec>& parameter_registry()
{
    static const std::vector<ParamSpec> registry = build_registry();
    return registry;
}

std::vector<std::string> sections_for(Mode mode)
{
    if (is_cv(mode))
        return {"cv"};
    if (is_dv(mode))
        return {"dv"};
    return {"link", "lidar", "background", "losses", "radar"};
}

std::vector<std::string> sweep_variables(Mode mode)
{
    if (mode == Mode::lidar_profile)
        return {"z"};
    if (mode == Mode::lidar_elevation)
        return {"theta_deg"};
    const std::string section = is_cv(mode) ? "cv" : "dv";
    std::vector<std::string> out;
    for (const auto& p : parameter_registry())
        if (p.section == section && p.real && p.key.rfind("mu_", 0) != 0)
            out.push_back(p.key);
    return out;
}

Config parse_scenario(std::string_view text, const std::string& origin)
{
    struct Entry {
        std::string section, key, value;
        int line;
    };
    std::vector<Entry> entries;
    std::map<std::pair<std::string, std::string>, int> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    auto parse_fail = [&](const std::string& key, const std::string& what) {
        return ScenarioError(ScenarioError::Kind::parse, origin, line_no, key, what);
    };

    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw parse_fail("", "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::vector<std::string> known = {"sweep", "cv",         "dv",     "link",
                                                           "lidar", "background", "losses", "radar"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw parse_fail(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw parse_fail("", "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw parse_fail("", "missing key");
        if (value.empty())
            throw parse_fail(key, "missing value");
        if (auto [it, fresh] = seen.emplace(std::make_pair(section, key), line_no); !fresh)
            throw parse_fail(key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
        entries.push_back({section, key, value, line_no});
    }

    Config cfg;
    bool have_mode = false;
    bool have_sweep = false;
    std::map<std::string, bool> sweep_keys;
    for (const auto& e : entries) {
        line_no = e.line;
        if (e.section.empty()) {
            if (e.key != "mode")
                throw parse_fail(e.key, "only 'mode' may appear before the first section");
            const auto m = parse_mode(e.value);
            if (!m)
                throw parse_fail(e.key, "unknown mode '" + e.value + "'");
            cfg.mode = *m;
            have_mode = true;
        }
    }
    if (!have_mode)
        throw validation_error(origin, "mode", "scenario does not set a mode");
    const auto allowed = sections_for(cfg.mode);

    for (const auto& e : entries) {
        line_no = e.line;
        if (e.section.empty())
            continue;
        try {
            if (e.section == "sweep") {
                have_sweep = true;
                sweep_keys[e.key] = true;
                if (e.key == "variable")
                    cfg.sweep.variable = e.value;
                else if (e.key == "start")
                    cfg.sweep.start = parse_real(e.value);
                else if (e.key == "stop")
                    cfg.sweep.stop = parse_real(e.value);
                else if (e.key == "points")
                    cfg.sweep.points = parse_int(e.value);
                else if (e.key == "scale") {
                    if (e.value == "linear")
                        cfg.sweep.scale = Scale::linear;
                    else if (e.value == "log")
                        cfg.sweep.scale = Scale::log;
                    else
                        throw std::invalid_argument("expected linear or log, got '" + e.value + "'");
                } else
                    throw parse_fail("sweep." + e.key, "unknown key");
                continue;
            }
            if (std::find(allowed.begin(), allowed.end(), e.section) == allowed.end())
                throw parse_fail(e.section, "section is not used by mode " + std::string(to_string(cfg.mode)));
            const ParamSpec* p = find_param(e.section, e.key);
            if (!p)
                throw parse_fail(e.section + "." + e.key, "unknown key");
            p->set(cfg, e.value);
        } catch (const std::invalid_argument& ex) {
            throw parse_fail(e.section + "." + e.key, ex.what());
        }
    }
    if (!have_sweep)
        throw validation_error(origin, "sweep", "scenario has no [sweep] section");
    for (const char* k : {"variable", "start", "stop", "points"})
        if (!sweep_keys.count(k))
            throw validation_error(origin, std::string("sweep.") + k, "missing");

    validate(cfg, origin);
    return cfg;
}

Config load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("cannot read scenario file " + path.string());
    return parse_scenario(buf.str(), path.string());
}

void validate(const Config& cfg, const std::string& origin)
{
    const auto& s = cfg.sweep;
    check(s.points >= 2, origin, "sweep.points", "a sweep needs at least 2 points");
    const auto vars = sweep_variables(cfg.mode);
    check(std::find(vars.begin(), vars.end(), s.variable) != vars.end(), origin, "sweep.variable",
          "'" + s.variable + "' is not a sweepable parameter of mode " + std::string(to_string(cfg.mode)));
    if (s.scale == Scale::log)
        check(s.start > 0.0 && s.stop > 0.0, origin, "sweep.scale", "log sweeps need positive endpoints");
    for (double v : s.values())
        validate_point(at_point(cfg, v), v, origin);
}

io::ResultTable run_scenario(const Config& cfg, int threads)
{
    const auto t0 = std::chrono::steady_clock::now();
    io::ResultTable table;
    table.columns = columns_for(cfg);
    table.metadata.emplace_back("engine", std::string("rqkd ") + RQKD_VERSION);
    table.metadata.emplace_back("mode", std::string(to_string(cfg.mode)));
    table.metadata.emplace_back(
        "sweep", cfg.sweep.variable + " " + io::format_number(cfg.sweep.start) + " " +
                     io::format_number(cfg.sweep.stop) + " " + std::to_string(cfg.sweep.points) + " " +
                     (cfg.sweep.scale == Scale::log ? "log" : "linear"));
    for (const auto& section : sections_for(cfg.mode))
        for (const auto& p : parameter_registry())
            if (p.section == section && p.key != cfg.sweep.variable)  // the sweep line covers it
                table.metadata.emplace_back(p.section + "." + p.key, p.get(cfg));

    const auto xs = cfg.sweep.values();
    const std::size_t n = xs.size();
    std::vector<std::vector<Cell>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                rows[i] = eval_point(cfg, xs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int n_workers = std::min<int>(threads, static_cast<int>(n));
    std::vector<std::thread> pool;
    for (int k = 1; k < n_workers; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    for (auto& r : rows)
        table.add_row(std::move(r));

    if (is_cv(cfg.mode)) {
        const auto col = table.column_index("feasible");
        const bool any = std::any_of(table.rows.begin(), table.rows.end(),
                                     [&](const auto& r) { return r[col] && *r[col] > 0.0; });
        if (!any)
            throw std::domain_error("no sweep point admits a feasible attack; check t_eq against eta_ae");
    }
    table.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return table;
}

}  // namespace rqkd::scenario
