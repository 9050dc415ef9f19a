#pragma once

#include <optional>
#include <vector>

namespace rqkd::lidar {

/// Gaussian beam launched from a transmitter of waist W0.
struct BeamParams {
    double w0 = 0.15;         // m
    double lambda = 800e-9;   // m
    double m2 = 3.0;

    double rayleigh_range() const;
};

struct LidarConfig {
    double p_t = 1.0;     // W
    double kappa = 0.25;  // collection/transmission loss factor
    double alpha = 0.1;   // reflectivity of Eve's object
    double p_min = 0.0;   // W, detection floor
    BeamParams beam;
};

struct LinkGeometry {
    double L = 500e3;    // m
    double r_a = 0.15;   // m
    double r_b = 0.5;    // m
    double theta = 0.0;  // rad from zenith
};

/// Ground radar at Bob's site.
struct RadarParams {
    double p_t = 1e5;              // W
    double r_ant = 2.0;            // m
    double lambda = 0.04;          // m
    double efficiency = 0.6;
    double noise_figure_db = 8.0;
    double bandwidth = 2.5e6;      // Hz
    double kappa_db = 7.0;
    double temperature = 290.0;    // K, noise reference temperature

    double gain() const;
    double p_min() const;  // k_B T F_n B
};

/// Night-time background seen by the two LIDARs.
struct BackgroundParams {
    double albedo_earth = 0.3;
    double albedo_moon = 0.12;
    double moon_radius = 1.7374e6;      // m
    double earth_moon = 3.844e8;        // m
    double sun_irradiance = 1.1;        // W m^-2 nm^-1 at 800 nm
    double sky_radiance = 1.5e-6;       // W m^-2 sr^-1 nm^-1
    double filter_nm = 1.0;
    double fov_sr = 2e-7;
};

enum class Side { satellite, ground };

/// W(z) = W0 sqrt(1 + (z M^2 / z_R)^2).
double beam_width(double z, const BeamParams& beam);

/// Fraction of a centred Gaussian beam of width W inside radius rho.
double aperture_transmittance(double rho, double W);

/// Width at Bob of a beam Eve focuses from position z with radius r_e.
/// Throws std::domain_error for z >= L.
double focused_beam_width(double z, double r_e, const LinkGeometry& geom, double lambda);

/// Largest cross-section (m^2) the radar misses at distance d.
double radar_cross_section_bound(double d, const RadarParams& radar);
/// Radius of a sphere with the given cross-section.
double sphere_radius(double sigma);

/// Largest radius of an object at range z that returns less than p_min.
/// Empty when no size is detectable at that range.
std::optional<double> lidar_size_bound(double z, const LidarConfig& cfg);

/// Reflectivity below which lidar_size_bound at range z is empty.
double min_reflectivity(double z, const LidarConfig& cfg);

/// Background power used as the detection floor. The aperture radius is
/// r_A for the satellite and r_B for the ground station.
double background_power(Side side, const BackgroundParams& bg, double aperture_radius);

struct ProfilePoint {
    double z;
    std::optional<double> r_e;  // empty: unbounded
    double eta_ae;
    double eta_eb;
    double w_e;   // width of Eve's focused beam at Bob; 0 when r_e is unbounded
    double w_a;   // width of Alice's beam at z
};

/// Dual-LIDAR bound at one position: the smaller of the satellite bound at
/// range z and the ground bound at range L - z.
ProfilePoint profile_at(double z, const LinkGeometry& geom, const LidarConfig& cfg_sat,
                        const LidarConfig& cfg_ground);

/// Eve's best collection and injection efficiencies along the link, with
/// LIDARs on both ends. z runs over n_points interior positions of (0, L).
/// An unbounded r_e gives eta_ae = eta_eb = 1.
std::vector<ProfilePoint> eve_efficiency_profile(const LinkGeometry& geom,
                                                 const LidarConfig& cfg_sat,
                                                 const LidarConfig& cfg_ground, int n_points);

/// Reflectivity needed so that at every z at least one LIDAR bounds Eve.
double pass_min_reflectivity(const LinkGeometry& geom, const LidarConfig& cfg_sat,
                             const LidarConfig& cfg_ground, int n_points);

inline constexpr double kEarthRadius = 6.371e6;

/// Distance to a satellite at altitude h seen at zenith angle theta.
double slant_range(double altitude, double theta);

struct LossBudget {
    double extinction_beta = 0.7;
    double detection = 0.5;
    double optics = 0.8;
};

/// Nominal monitoring setup; each LidarConfig's waist and floor follow from
/// the geometry and background.
struct MonitorSetup {
    LinkGeometry geom;
    double lambda = 800e-9;
    double m2 = 3.0;
    double p_t_sat = 1.0;
    double p_t_ground = 1.0;
    double kappa = 0.25;
    double alpha = 0.1;
    BackgroundParams background;
    LossBudget losses;

    LidarConfig satellite_config() const;
    LidarConfig ground_config() const;
};

struct ElevationPoint {
    double theta;
    double distance;
    double max_eta_ae;
    double max_eta_eb;
    double eta_ab_diffraction;
    double eta_ab_total;
    double alpha_min;
};

/// One row per zenith angle; the link length is the slant range to a
/// satellite at `altitude`. Throws std::domain_error for theta >= pi/2.
std::vector<ElevationPoint> elevation_sweep(double altitude, const MonitorSetup& setup,
                                            const std::vector<double>& thetas, int n_points);

}  // namespace rqkd::lidar
