#include "rqkd/lidar_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rqkd::lidar {

namespace {

constexpr double kBoltzmann = 1.380649e-23;

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double square(double x) { return x * x; }

}  // namespace

double BeamParams::rayleigh_range() const { return std::numbers::pi * w0 * w0 / lambda; }

double RadarParams::gain() const
{
    return 4.0 * std::numbers::pi * efficiency * std::numbers::pi * r_ant * r_ant / (lambda * lambda);
}

double RadarParams::p_min() const
{
    return kBoltzmann * temperature * from_db(noise_figure_db) * bandwidth;
}

double beam_width(double z, const BeamParams& beam)
{
    if (z < 0.0)
        throw std::domain_error("beam_width: z must be >= 0");
    return beam.w0 * std::sqrt(1.0 + square(z * beam.m2 / beam.rayleigh_range()));
}

double aperture_transmittance(double rho, double W)
{
    if (rho < 0.0 || !(W > 0.0))
        throw std::domain_error("aperture_transmittance: need rho >= 0 and W > 0");
    return -std::expm1(-2.0 * rho * rho / (W * W));
}

double focused_beam_width(double z, double r_e, const LinkGeometry& geom, double lambda)
{
    if (z >= geom.L || z < 0.0)
        throw std::domain_error("focused_beam_width: need 0 <= z < L");
    if (!(r_e > 0.0))
        return std::numeric_limits<double>::infinity();
    return lambda * (geom.L - z) / (std::numbers::pi * r_e);
}

double radar_cross_section_bound(double d, const RadarParams& radar)
{
    const double g = radar.gain();
    return radar.p_min() * std::pow(4.0 * std::numbers::pi, 3) * from_db(radar.kappa_db) *
           std::pow(d, 4) / (radar.p_t * g * g * radar.lambda * radar.lambda);
}

double sphere_radius(double sigma) { return std::sqrt(sigma / std::numbers::pi); }

double min_reflectivity(double z, const LidarConfig& cfg)
{
    return 2.0 * cfg.p_min * cfg.kappa * z * z / (cfg.p_t * square(cfg.beam.w0));
}

std::optional<double> lidar_size_bound(double z, const LidarConfig& cfg)
{
    const double x = min_reflectivity(z, cfg) / cfg.alpha;
    if (x >= 1.0)
        return std::nullopt;
    const double far_width = cfg.beam.lambda * z * cfg.beam.m2 / (std::numbers::pi * cfg.beam.w0);
    return std::sqrt(-std::log1p(-x)) * far_width;
}

double background_power(Side side, const BackgroundParams& bg, double aperture_radius)
{
    const double r2 = aperture_radius * aperture_radius;
    if (side == Side::satellite)
        return bg.albedo_earth * bg.albedo_moon * square(bg.moon_radius) * r2 * bg.fov_sr /
               square(bg.earth_moon) * bg.sun_irradiance * bg.filter_nm;
    return bg.sky_radiance * bg.fov_sr * std::numbers::pi * r2 * bg.filter_nm;
}

ProfilePoint profile_at(double z, const LinkGeometry& geom, const LidarConfig& cfg_sat,
                        const LidarConfig& cfg_ground)
{
    ProfilePoint p{};
    p.z = z;
    const auto from_a = lidar_size_bound(z, cfg_sat);
    const auto from_b = lidar_size_bound(geom.L - z, cfg_ground);
    if (from_a && from_b)
        p.r_e = std::min(*from_a, *from_b);
    else if (from_a)
        p.r_e = from_a;
    else
        p.r_e = from_b;
    p.w_a = beam_width(z, cfg_sat.beam);
    if (p.r_e) {
        p.eta_ae = aperture_transmittance(*p.r_e, p.w_a);
        p.w_e = focused_beam_width(z, *p.r_e, geom, cfg_sat.beam.lambda);
        p.eta_eb = std::isfinite(p.w_e) ? aperture_transmittance(geom.r_b, p.w_e) : 0.0;
    } else {
        p.eta_ae = 1.0;
        p.eta_eb = 1.0;
        p.w_e = 0.0;
    }
    return p;
}

std::vector<ProfilePoint> eve_efficiency_profile(const LinkGeometry& geom,
                                                 const LidarConfig& cfg_sat,
                                                 const LidarConfig& cfg_ground, int n_points)
{
    if (n_points < 2)
        throw std::invalid_argument("eve_efficiency_profile: need at least 2 points");
    std::vector<ProfilePoint> out;
    out.reserve(n_points);
    for (int i = 0; i < n_points; ++i)
        out.push_back(profile_at(geom.L * (i + 1) / (n_points + 1), geom, cfg_sat, cfg_ground));
    return out;
}

double pass_min_reflectivity(const LinkGeometry& geom, const LidarConfig& cfg_sat,
                             const LidarConfig& cfg_ground, int n_points)
{
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double z = geom.L * (i + 1) / (n_points + 1);
        worst = std::max(worst, std::min(min_reflectivity(z, cfg_sat),
                                         min_reflectivity(geom.L - z, cfg_ground)));
    }
    return worst;
}

double slant_range(double altitude, double theta)
{
    if (!(theta >= 0.0 && theta < std::numbers::pi / 2.0))
        throw std::domain_error("slant_range: zenith angle must lie in [0, pi/2)");
    const double r = kEarthRadius;
    return std::sqrt(square(r + altitude) - square(r * std::sin(theta))) - r * std::cos(theta);
}

LidarConfig MonitorSetup::satellite_config() const
{
    LidarConfig c;
    c.p_t = p_t_sat;
    c.kappa = kappa;
    c.alpha = alpha;
    c.beam = {geom.r_a, lambda, m2};
    c.p_min = background_power(Side::satellite, background, geom.r_a);
    return c;
}

LidarConfig MonitorSetup::ground_config() const
{
    LidarConfig c;
    c.p_t = p_t_ground;
    c.kappa = kappa;
    c.alpha = alpha;
    c.beam = {geom.r_b, lambda, m2};
    c.p_min = background_power(Side::ground, background, geom.r_b);
    return c;
}

std::vector<ElevationPoint> elevation_sweep(double altitude, const MonitorSetup& setup,
                                            const std::vector<double>& thetas, int n_points)
{
    const LidarConfig sat = setup.satellite_config();
    const LidarConfig ground = setup.ground_config();
    std::vector<ElevationPoint> out;
    out.reserve(thetas.size());
    for (double theta : thetas) {
        LinkGeometry g = setup.geom;
        g.theta = theta;
        g.L = slant_range(altitude, theta);
        ElevationPoint e{};
        e.theta = theta;
        e.distance = g.L;
        for (const ProfilePoint& p : eve_efficiency_profile(g, sat, ground, n_points)) {
            e.max_eta_ae = std::max(e.max_eta_ae, p.eta_ae);
            e.max_eta_eb = std::max(e.max_eta_eb, p.eta_eb);
        }
        e.eta_ab_diffraction = aperture_transmittance(g.r_b, beam_width(g.L, sat.beam));
        e.eta_ab_total = e.eta_ab_diffraction * std::exp(-setup.losses.extinction_beta / std::cos(theta)) *
                         setup.losses.detection * setup.losses.optics;
        e.alpha_min = pass_min_reflectivity(g, sat, ground, n_points);
        out.push_back(e);
    }
    return out;
}

}  // namespace rqkd::lidar
