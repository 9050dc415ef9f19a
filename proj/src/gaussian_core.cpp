#include "rqkd/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

namespace rqkd::gaussian {

namespace {

void check_mode(const CovarianceMatrix& cm, int mode, const char* what)
{
    if (mode < 0 || mode >= cm.n_modes()) {
        std::ostringstream msg;
        msg << what << ": mode index " << mode << " out of range for a " << cm.n_modes()
            << "-mode state";
        throw std::out_of_range(msg.str());
    }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries))
{
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || entries_.rows() % 2 != 0)
        throw std::invalid_argument("covariance matrix must be square with even, nonzero dimension");
    if (!entries_.allFinite())
        throw std::invalid_argument("covariance matrix has non-finite entries");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("covariance matrix is not symmetric");
    // Remove the rounding-level asymmetry so downstream algebra stays exact.
    entries_ = 0.5 * (entries_ + entries_.transpose());
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes)
{
    if (n_modes <= 0)
        throw std::invalid_argument("vacuum: n_modes must be positive");
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix CovarianceMatrix::thermal(double variance)
{
    if (!(variance >= 1.0))
        throw std::domain_error("thermal: variance must be >= 1");
    return CovarianceMatrix(variance * Eigen::MatrixXd::Identity(2, 2));
}

CovarianceMatrix CovarianceMatrix::tmsv(double variance)
{
    if (!(variance >= 1.0))
        throw std::domain_error("tmsv: variance must be >= 1");
    const double c = std::sqrt(variance * variance - 1.0);
    Eigen::MatrixXd m = variance * Eigen::MatrixXd::Identity(4, 4);
    m(0, 2) = m(2, 0) = c;
    m(1, 3) = m(3, 1) = -c;
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix CovarianceMatrix::direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b)
{
    const auto na = a.entries_.rows();
    const auto nb = b.entries_.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(na + nb, na + nb);
    m.topLeftCorner(na, na) = a.entries_;
    m.bottomRightCorner(nb, nb) = b.entries_;
    return CovarianceMatrix(std::move(m));
}

Eigen::Matrix2d CovarianceMatrix::block(int i, int j) const
{
    check_mode(*this, i, "block");
    check_mode(*this, j, "block");
    return entries_.block<2, 2>(2 * i, 2 * j);
}

CovarianceMatrix CovarianceMatrix::reduced(std::span<const int> modes) const
{
    if (modes.empty())
        throw std::invalid_argument("reduced: at least one mode must be kept");
    const auto k = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXd m(2 * k, 2 * k);
    for (Eigen::Index r = 0; r < k; ++r) {
        check_mode(*this, modes[r], "reduced");
        for (Eigen::Index c = 0; c < k; ++c)
            m.block<2, 2>(2 * r, 2 * c) = entries_.block<2, 2>(2 * modes[r], 2 * modes[c]);
    }
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix CovarianceMatrix::reduced(std::initializer_list<int> modes) const
{
    return reduced(std::span<const int>(modes.begin(), modes.size()));
}

Eigen::MatrixXd symplectic_form(int n_modes)
{
    if (n_modes <= 0)
        throw std::invalid_argument("symplectic_form: n_modes must be positive");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

double g_func(double x)
{
    if (!(x >= 1.0 - kPhysicalityBand)) {
        std::ostringstream msg;
        msg << "g_func: argument " << x << " below 1";
        throw std::domain_error(msg.str());
    }
    const double d = x - 1.0;
    if (d < 1e-12)
        return 0.0;
    // log2((x+1)/2) + ((x-1)/2) log2(1 + 2/(x-1)) is the textbook
    // expression rearranged; it stays accurate for x up to ~1e300.
    return std::log2(0.5 * (x + 1.0)) + 0.5 * d * std::log1p(2.0 / d) / std::numbers::ln2;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm)
{
    const int n = cm.n_modes();
    const Eigen::MatrixXcd m =
        std::complex<double>(0.0, 1.0) * (symplectic_form(n) * cm.matrix()).cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("symplectic_eigenvalues: eigensolver did not converge");

    std::vector<double> magnitudes;
    magnitudes.reserve(2 * n);
    for (const auto& ev : solver.eigenvalues())
        magnitudes.push_back(std::abs(ev));
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());

    // Eigenvalues come in +/- pairs; after sorting by magnitude each pair
    // occupies two adjacent slots.
    std::vector<double> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        double lambda = 0.5 * (magnitudes[2 * k] + magnitudes[2 * k + 1]);
        if (lambda < 1.0 - kPhysicalityBand) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "symplectic eigenvalue " << lambda << " violates the uncertainty principle";
            throw UnphysicalStateError(msg.str());
        }
        out.push_back(std::max(lambda, 1.0));
    }
    return out;
}

double von_neumann_entropy(const CovarianceMatrix& cm)
{
    double s = 0.0;
    for (double lambda : symplectic_eigenvalues(cm))
        s += g_func(lambda);
    return s;
}

CovarianceMatrix apply_beamsplitter(const CovarianceMatrix& cm, int mode_a, int mode_b,
                                    double transmissivity)
{
    check_mode(cm, mode_a, "apply_beamsplitter");
    check_mode(cm, mode_b, "apply_beamsplitter");
    if (mode_a == mode_b)
        throw std::invalid_argument("apply_beamsplitter: modes must be distinct");
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw std::domain_error("apply_beamsplitter: transmissivity outside [0, 1]");

    const double t = std::sqrt(transmissivity);
    const double r = std::sqrt(1.0 - transmissivity);
    const auto dim = cm.matrix().rows();
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
    for (int q = 0; q < 2; ++q) {
        const int a = 2 * mode_a + q;
        const int b = 2 * mode_b + q;
        s(a, a) = t;
        s(a, b) = r;
        s(b, a) = -r;
        s(b, b) = t;
    }
    return CovarianceMatrix(s * cm.matrix() * s.transpose());
}

CovarianceMatrix apply_phase_flip(const CovarianceMatrix& cm, int mode)
{
    check_mode(cm, mode, "apply_phase_flip");
    Eigen::MatrixXd m = cm.matrix();
    m.middleRows(2 * mode, 2) *= -1.0;
    m.middleCols(2 * mode, 2) *= -1.0;
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& cm, int measured_mode,
                                       Quadrature quadrature)
{
    check_mode(cm, measured_mode, "condition_on_homodyne");
    if (cm.n_modes() < 2)
        throw std::invalid_argument("condition_on_homodyne: no modes left after measurement");

    const int q = 2 * measured_mode + (quadrature == Quadrature::x ? 0 : 1);
    const double v_meas = cm(q, q);
    if (v_meas <= 1e-12)
        throw SingularMeasurementError("condition_on_homodyne: measured variance is zero");

    std::vector<int> rest;
    for (int k = 0; k < cm.n_modes(); ++k)
        if (k != measured_mode)
            rest.push_back(k);
    const CovarianceMatrix remaining = cm.reduced(rest);

    // Sigma Pi Sigma^T with Pi = diag(1,0) (or diag(0,1)) is the outer
    // product of the column that couples the measured quadrature to the
    // remaining modes.
    Eigen::VectorXd coupling(2 * rest.size());
    for (std::size_t k = 0; k < rest.size(); ++k) {
        coupling(2 * k) = cm(2 * rest[k], q);
        coupling(2 * k + 1) = cm(2 * rest[k] + 1, q);
    }
    return CovarianceMatrix(remaining.matrix() - (coupling * coupling.transpose()) / v_meas);
}

}  // namespace rqkd::gaussian
