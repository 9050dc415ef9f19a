#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rqkd/gaussian_core.hpp"

namespace rqkd::cv {

using gaussian::CovarianceMatrix;

/// What Alice and Bob measure on the channel plus their trusted receiver.
struct ChannelObservation {
    double t_eq = 1e-3;   // end-to-end transmissivity, detector included
    double xi = 0.1;      // excess noise referred to the transmitter, SNU
    double eta_d = 1.0;   // detector efficiency
    double nu_el = 0.0;   // electronic noise, SNU

    double eta_ch() const { return t_eq / eta_d; }
    /// Throws std::invalid_argument naming the violated range.
    void validate() const;
};

struct CvScenario {
    double eta_ae = 1.0;  // bound on Eve's collection efficiency
    double eta_s = 0.0;   // bypass transmissivity
    double eta_t = 1.0;   // telescope coupling
    double V = 300.0;     // TMSV variance, SNU
    double beta = 1.0;    // reconciliation efficiency
    double v_s = 1.0;     // variance of the bypass input (1 = vacuum)

    void validate() const;
};

struct AttackSolution {
    double eta_e = 0.0;
    double v_e = 1.0;
    bool feasible = false;
};

enum class Mode { rr, dr_m1, dr_m2 };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Eve's cloner variance above which a point is treated as infeasible: the
/// Holevo terms lose all precision in double arithmetic beyond it.
inline constexpr double kMaxEveVariance = 1e6;

/// Channel transmissivity seen by Bob for the bypass network.
double network_transmissivity(double eta_ae, double eta_s, double eta_t, double eta_e);

/// Entangling-cloner parameters that reproduce the observation; infeasible
/// points are reported through `feasible`, never thrown.
AttackSolution solve_attack(const CvScenario& scenario, const ChannelObservation& obs);

/// A, B, E, E' covariance matrix of the bypass network (modes 0..3).
/// Throws std::invalid_argument for an infeasible attack.
CovarianceMatrix build_cm(const CvScenario& scenario, const AttackSolution& attack);

/// Alice-Bob mutual information (bits/use) for homodyne detection.
double mutual_info(const ChannelObservation& obs, double V);

/// Reverse-reconciliation Holevo bound from the ABEE' matrix, ideal
/// homodyne on B's x quadrature.
double holevo_rr(const CovarianceMatrix& abee);
/// Same, with Bob's trusted detector inefficiency and electronic noise.
double holevo_rr(const CovarianceMatrix& abee, double eta_d, double nu_el);

/// A_x, E, E' matrix used for the direct-reconciliation bound. A_x is the
/// x-output of Alice's heterodyne split.
CovarianceMatrix build_axee_cm(const CovarianceMatrix& abee);

double holevo_dr_m1(const CovarianceMatrix& axee);

/// g(V_B') - g(sqrt(V_B')) with V_B' = eta_ae V + 1 - eta_ae.
double holevo_dr_m2_bound(double eta_ae, double V);

struct PointResult {
    std::optional<double> rate;  // empty when the attack is infeasible
    double chi = 0.0;
    double i_ab = 0.0;
    AttackSolution attack;
};

/// beta I_AB - chi for one (eta_s, eta_t). Negative rates are returned as-is.
PointResult key_rate_point(const CvScenario& scenario, const ChannelObservation& obs, Mode mode);

struct GridSpec {
    int n_eta_s = 101;
    int n_eta_t = 101;
    int refine_starts = 5;
};

/// Range of eta_t for which eta_e lands in [0, 1] at a given eta_s.
struct Interval {
    double lo;
    double hi;
};
std::optional<Interval> feasible_eta_t(double eta_ae, double eta_s, double transmissivity);

struct WorstCase {
    double rate_a = 0.0;
    double argmin_eta_s = 0.0;
    double argmin_eta_t = 0.0;
    std::optional<double> rate_b;  // empty when (0, 1) is infeasible
    int feasible_points = 0;
};

/// Minimum key rate over (eta_s, eta_t). The eta_t axis of the grid is
/// mapped onto the feasible interval at each eta_s; the best
/// `refine_starts` grid points seed a Nelder-Mead refinement.
/// Throws std::domain_error when no grid point is feasible.
WorstCase worst_case_rate(const CvScenario& base, const ChannelObservation& obs, Mode mode,
                          const GridSpec& grid = {});

}  // namespace rqkd::cv
