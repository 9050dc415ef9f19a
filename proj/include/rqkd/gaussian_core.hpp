#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rqkd::gaussian {

/// Thrown when a covariance matrix violates the uncertainty principle
/// beyond the rounding band.
class UnphysicalStateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when a homodyne measurement is taken on a quadrature with
/// (numerically) zero variance.
class SingularMeasurementError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Quadrature { x, p };

/// Symplectic eigenvalues below 1 by less than this are rounding noise.
inline constexpr double kPhysicalityBand = 1e-9;

/// Quadrature covariances of a zero-mean Gaussian state in shot-noise units,
/// ordered (x1, p1, x2, p2, ...). Vacuum has variance 1.
class CovarianceMatrix {
public:
    /// Takes ownership of a 2n x 2n matrix; throws std::invalid_argument if it
    /// is not square, has odd dimension, or is asymmetric beyond 1e-12
    /// relative to its largest entry.
    explicit CovarianceMatrix(Eigen::MatrixXd entries);

    static CovarianceMatrix vacuum(int n_modes);
    static CovarianceMatrix thermal(double variance);
    /// Two-mode squeezed vacuum: V on the diagonal, sqrt(V^2-1) Z off it.
    static CovarianceMatrix tmsv(double variance);
    /// Block-diagonal product state.
    static CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b);

    int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
    const Eigen::MatrixXd& matrix() const { return entries_; }
    double operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

    /// 2x2 block between modes i and j.
    Eigen::Matrix2d block(int i, int j) const;

    /// Reduced state on the listed modes, in the listed order.
    CovarianceMatrix reduced(std::span<const int> modes) const;
    CovarianceMatrix reduced(std::initializer_list<int> modes) const;

private:
    Eigen::MatrixXd entries_;
};

/// Block-diagonal symplectic form with blocks [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int n_modes);

/// Entropy (bits) of a thermal mode with symplectic eigenvalue x.
/// Throws std::domain_error for x < 1 - kPhysicalityBand.
double g_func(double x);

/// Symplectic eigenvalues, sorted descending, clamped to 1 inside the
/// physicality band. Throws UnphysicalStateError below the band.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm);

double von_neumann_entropy(const CovarianceMatrix& cm);

/// Mixes modes a and b on a beam splitter of the given transmissivity:
///   a' =  sqrt(t) a + sqrt(1-t) b
///   b' = -sqrt(1-t) a + sqrt(t) b
/// applied identically to x and p. At t = 0 the modes swap with b' = -a.
/// The inverse transformation is apply_beamsplitter(cm, b, a, t).
CovarianceMatrix apply_beamsplitter(const CovarianceMatrix& cm, int mode_a, int mode_b,
                                    double transmissivity);

/// pi phase shift on one mode (x, p) -> (-x, -p).
CovarianceMatrix apply_phase_flip(const CovarianceMatrix& cm, int mode);

/// State of the remaining modes after an ideal homodyne measurement of one
/// quadrature of `measured_mode`:
///   V_rest - (1 / V_m) Sigma Pi Sigma^T
/// Throws SingularMeasurementError if V_m <= 1e-12.
CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& cm, int measured_mode,
                                       Quadrature quadrature);

}  // namespace rqkd::gaussian
