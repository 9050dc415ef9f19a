#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "../oracles/oracles.hpp"
#include "rqkd/gaussian_core.hpp"

using namespace rqkd::gaussian;

namespace {

bool all_close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("g at the exact points")
{
    CHECK(g_func(1.0) == 0.0);
    CHECK(g_func(3.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g_func(1.0 - 1e-10) == 0.0);
    CHECK_THROWS_AS(g_func(0.9), std::domain_error);
}

TEST_CASE("g(10) against a Fock-basis sum")
{
    CHECK(std::abs(g_func(10.0) - oracle::fock_entropy(10.0, 200)) < 1e-10);
    // large arguments stay accurate: g ~ log2(e x / 2)
    const double x = 1e8;
    CHECK(g_func(x) == doctest::Approx(std::log2(x / 2.0) + 1.0 / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("symplectic eigenvalues of textbook states")
{
    for (int n : {1, 2, 4}) {
        const auto nu = symplectic_eigenvalues(CovarianceMatrix::vacuum(n));
        REQUIRE(nu.size() == static_cast<std::size_t>(n));
        for (double x : nu)
            CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (double x : symplectic_eigenvalues(CovarianceMatrix::tmsv(5.0)))
        CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
    const auto th = symplectic_eigenvalues(CovarianceMatrix::thermal(7.0));
    REQUIRE(th.size() == 1);
    CHECK(th[0] == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("symplectic eigenvalues match the Delta formula on two-mode states")
{
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const Eigen::MatrixXd m = oracle::random_physical_cm(2, rng);
        const auto nu = symplectic_eigenvalues(CovarianceMatrix(m));
        const auto ref = oracle::delta_eigenvalues(m);
        CHECK(nu[0] == doctest::Approx(ref[0]).epsilon(1e-9));
        CHECK(nu[1] == doctest::Approx(ref[1]).epsilon(1e-9));
    }
}

TEST_CASE("unphysical matrices are rejected")
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(symplectic_eigenvalues(CovarianceMatrix(m)), UnphysicalStateError);
    Eigen::MatrixXd asym(2, 2);
    asym << 2.0, 0.5, 0.0, 2.0;
    CHECK_THROWS_AS(CovarianceMatrix{asym}, std::invalid_argument);
    CHECK_THROWS_AS(CovarianceMatrix{Eigen::MatrixXd::Identity(3, 3)}, std::invalid_argument);
}

TEST_CASE("entropy of simple states")
{
    CHECK(von_neumann_entropy(CovarianceMatrix::vacuum(3)) == doctest::Approx(0.0));
    CHECK(std::abs(von_neumann_entropy(CovarianceMatrix::tmsv(300.0))) < 1e-6);
    CHECK(von_neumann_entropy(CovarianceMatrix::thermal(3.0)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("beam splitter limits")
{
    std::mt19937_64 rng(11);
    const CovarianceMatrix cm(oracle::random_physical_cm(3, rng));
    CHECK(all_close(apply_beamsplitter(cm, 0, 2, 1.0).matrix(), cm.matrix(), 1e-14));

    // t = 0 swaps the modes, with b' = -a, which leaves every block with a
    // single sign flip on the entries that touch exactly one of the pair.
    const CovarianceMatrix sw = apply_beamsplitter(cm, 0, 2, 0.0);
    CHECK(all_close(sw.block(0, 0), cm.block(2, 2), 1e-14));
    CHECK(all_close(sw.block(2, 2), cm.block(0, 0), 1e-14));
    CHECK(all_close(sw.block(0, 2), -cm.block(2, 0), 1e-14));
    CHECK(all_close(sw.block(0, 1), cm.block(2, 1), 1e-14));
    CHECK(all_close(sw.block(2, 1), -cm.block(0, 1), 1e-14));
}

TEST_CASE("loss on one half of a TMSV")
{
    for (double eta : {0.0, 0.1, 0.5, 0.93, 1.0}) {
        const double V = 300.0;
        auto st = CovarianceMatrix::direct_sum(CovarianceMatrix::tmsv(V), CovarianceMatrix::vacuum(1));
        st = apply_beamsplitter(st, 1, 2, eta);
        CHECK(st(2, 2) == doctest::Approx(eta * V + 1.0 - eta).epsilon(1e-13));
        CHECK(st(3, 3) == doctest::Approx(eta * V + 1.0 - eta).epsilon(1e-13));
        CHECK(st(0, 2) == doctest::Approx(std::sqrt(eta * (V * V - 1.0))).epsilon(1e-13));
        CHECK(st(1, 3) == doctest::Approx(-std::sqrt(eta * (V * V - 1.0))).epsilon(1e-13));
    }
}

TEST_CASE("beam splitter is symplectic and invertible")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const CovarianceMatrix cm(oracle::random_physical_cm(3, rng));
        const double t = u(rng);
        const auto out = apply_beamsplitter(cm, 0, 1, t);
        const auto back = apply_beamsplitter(out, 1, 0, t);
        CHECK(all_close(back.matrix(), cm.matrix(), 1e-10 * cm.matrix().cwiseAbs().maxCoeff()));
        const auto a = symplectic_eigenvalues(cm);
        const auto b = symplectic_eigenvalues(out);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
    }
    CHECK_THROWS(apply_beamsplitter(CovarianceMatrix::vacuum(2), 0, 1, 1.5));
    CHECK_THROWS(apply_beamsplitter(CovarianceMatrix::vacuum(2), 0, 0, 0.5));
}

TEST_CASE("phase flip negates cross terms only")
{
    const auto st = CovarianceMatrix::tmsv(4.0);
    const auto f = apply_phase_flip(st, 1);
    CHECK(f(0, 2) == doctest::Approx(-st(0, 2)));
    CHECK(f(1, 3) == doctest::Approx(-st(1, 3)));
    CHECK(f(2, 2) == doctest::Approx(st(2, 2)));
}

TEST_CASE("homodyne conditioning against the pseudo-inverse form")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        const Eigen::MatrixXd m = oracle::random_physical_cm(3, rng);
        for (int mode = 0; mode < 3; ++mode)
            for (bool x : {true, false}) {
                const auto got = condition_on_homodyne(CovarianceMatrix(m), mode, x ? Quadrature::x : Quadrature::p);
                CHECK(all_close(got.matrix(), oracle::pinv_condition(m, mode, x), 1e-10));
            }
    }
}

TEST_CASE("homodyne on a TMSV half")
{
    const double V = 10.0;
    const auto c = condition_on_homodyne(CovarianceMatrix::tmsv(V), 1, Quadrature::x);
    CHECK(c(0, 0) == doctest::Approx(1.0 / V));
    CHECK(c(1, 1) == doctest::Approx(V));
}

TEST_CASE("homodyne on a zero-variance quadrature throws")
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 0) = 0.0;
    m(1, 1) = 1e20;
    CHECK_THROWS_AS(condition_on_homodyne(CovarianceMatrix(m), 0, Quadrature::x), SingularMeasurementError);
}

TEST_CASE("reduced state picks blocks in the given order")
{
    std::mt19937_64 rng(9);
    const CovarianceMatrix cm(oracle::random_physical_cm(3, rng));
    const auto r = cm.reduced({2, 0});
    CHECK(all_close(r.block(0, 0), cm.block(2, 2), 0.0));
    CHECK(all_close(r.block(0, 1), cm.block(2, 0), 0.0));
    CHECK_THROWS(cm.reduced({3}));
}
