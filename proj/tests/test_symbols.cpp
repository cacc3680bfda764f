#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "radhydro/symbols.hpp"

using namespace radhydro;
using linear::Matrix4;

TEST_CASE("compressible symbol entries at |xi| = 1") {
    Matrix4 J = linear::compressible_symbol(1.0);
    Matrix4 expected;
    expected << 0, 1, 0, 0,
        -1, 3, -1, -1,
        0, 1, 5, -1,
        0, 0, -4, 2;
    CHECK((J - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(linear::compressible_symbol(-1.0), std::invalid_argument);
}

TEST_CASE("characteristic coefficients at s = 1 are the golden integers") {
    const auto a = linear::characteristic_coefficients(1.0);
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 10.0);
    CHECK(a[2] == 29.0);
    CHECK(a[3] == 31.0);
    CHECK(a[4] == 6.0);
}

TEST_CASE("closed-form coefficients match the Faddeev-LeVerrier route") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double xi = trial == 0 ? 0.0 : dist(rng);
        const auto closed = linear::characteristic_coefficients(xi);
        const auto mat =
            linear::characteristic_coefficients_from_matrix(linear::compressible_symbol(xi));
        for (int i = 0; i < 5; ++i) {
            const double scale = std::max(1.0, std::abs(closed[i]));
            CHECK(std::abs(closed[i] - mat[i]) < 1e-10 * scale);
        }
    }
}

TEST_CASE("hurwitz minors: integer golden path at |xi| = 1") {
    const auto m = linear::hurwitz_minors_unit_integer();
    CHECK(m[0] == 10);
    CHECK(m[1] == 259);
    CHECK(m[2] == 7429);
    CHECK(m[3] == 44574);  // a4 * A3 = 6 * 7429

    const auto rep = linear::hurwitz_determinants(1.0);
    CHECK(std::abs(rep.minors[0] - 10.0) < 1e-12 * 10.0);
    CHECK(std::abs(rep.minors[1] - 259.0) < 1e-12 * 259.0);
    CHECK(std::abs(rep.minors[2] - 7429.0) < 1e-12 * 7429.0);
    CHECK(std::abs(rep.minors[3] - 44574.0) < 1e-12 * 44574.0);
    CHECK(rep.verdict == linear::StabilityVerdict::stable);
}

TEST_CASE("closed-form minors as polynomials in s") {
    // A1 = 5s+5, A2 = 32s^3+127s^2+100s, A3 = 96s^6+932s^5+2731s^4+2795s^3+875s^2
    for (double s : {0.3, 1.0, 2.5, 7.0}) {
        const auto rep = linear::hurwitz_determinants(std::sqrt(s));
        CHECK(rep.minors[0] == doctest::Approx(5 * s + 5).epsilon(1e-12));
        CHECK(rep.minors[1] ==
              doctest::Approx(32 * s * s * s + 127 * s * s + 100 * s).epsilon(1e-12));
        const double s2 = s * s, s3 = s2 * s;
        CHECK(rep.minors[2] ==
              doctest::Approx(96 * s3 * s3 + 932 * s3 * s2 + 2731 * s2 * s2 + 2795 * s3 +
                              875 * s2)
                  .epsilon(1e-12));
    }
}

TEST_CASE("verdict equivalence: minors positive iff spectrum in the right half plane") {
    const int points = 120;
    const double la = std::log(1e-3), lb = std::log(1e3);
    for (int i = 0; i < points; ++i) {
        const double xi = std::exp(la + (lb - la) * i / double(points - 1));
        const auto rep = linear::hurwitz_determinants(xi);
        const bool minors_pos = rep.minors[0] > 0 && rep.minors[1] > 0 && rep.minors[2] > 0 &&
                                rep.minors[3] > 0;
        const bool eigs_pos = rep.kappa_gap > 0.0;
        CHECK(minors_pos == eigs_pos);
        CHECK(rep.verdict == linear::StabilityVerdict::stable);
    }
}

TEST_CASE("spectrum at xi = 0 is {0, 0, 0, 5}") {
    const auto eigs = linear::eigenvalues(0.0);
    CHECK(std::abs(eigs[0]) < 1e-12);
    CHECK(std::abs(eigs[1]) < 1e-12);
    CHECK(std::abs(eigs[2]) < 1e-12);
    CHECK(std::abs(eigs[3] - 5.0) < 1e-12);
    CHECK(linear::hurwitz_determinants(0.0).verdict == linear::StabilityVerdict::marginal);
}

TEST_CASE("full 6x6 spectrum = reduced spectrum plus a double shear eigenvalue") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::uniform_real_distribution<double> mag(0.05, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Vector3d dir(dist(rng), dist(rng), dist(rng));
        dir.normalize();
        const double r = mag(rng);
        const Eigen::Vector3d xi = r * dir;

        Eigen::ComplexEigenSolver<linear::Matrix6c> es(linear::full_symbol(xi));
        std::vector<std::complex<double>> full(es.eigenvalues().data(),
                                               es.eigenvalues().data() + 6);

        std::vector<std::complex<double>> expected;
        for (const auto& l : linear::eigenvalues(r)) expected.push_back(l);
        expected.push_back(r * r);
        expected.push_back(r * r);

        // greedy multiset matching: nearly equal real parts make a sorted
        // comparison order-unstable
        std::vector<bool> used(6, false);
        for (const auto& want : expected) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 6; ++i) {
                if (used[i]) continue;
                const double d = std::abs(full[i] - want);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            used[best] = true;
            INFO("trial ", trial, " eigenvalue ", want.real(), "+", want.imag(), "i");
            CHECK(best_d < 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("propagator semigroup and generator") {
    for (double xi : {0.0, 0.3, 1.0, 4.0}) {
        const Matrix4 P0 = linear::propagator(0.0, xi);
        CHECK((P0 - Matrix4::Identity()).cwiseAbs().maxCoeff() < 1e-14);

        const Matrix4 Pab = linear::propagator(0.7, xi);
        const Matrix4 Pa = linear::propagator(0.3, xi);
        const Matrix4 Pb = linear::propagator(0.4, xi);
        CHECK((Pab - Pa * Pb).cwiseAbs().maxCoeff() < 1e-11 * Pab.cwiseAbs().maxCoeff() + 1e-13);

        // dP/dt = -J P via centered difference
        const double t = 0.5, h = 1e-5;
        const Matrix4 dP =
            (linear::propagator(t + h, xi) - linear::propagator(t - h, xi)) / (2 * h);
        const Matrix4 exact = -linear::compressible_symbol(xi) * linear::propagator(t, xi);
        CHECK((dP - exact).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK_THROWS_AS(linear::propagator(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("decay envelope over the medium band") {
    std::vector<double> t_grid;
    for (int i = 1; i <= 20; ++i) t_grid.push_back(20.0 * i);
    const auto env = linear::decay_envelope(0.1, 3.0, t_grid);
    CHECK(env.kappa_fit > 0.0);
    CHECK(env.min_spectral_gap > 0.0);
    CHECK(env.kappa_fit >= 0.95 * env.min_spectral_gap);
    CHECK_THROWS_AS(linear::decay_envelope(0.0, 1.0, t_grid), std::invalid_argument);
}

TEST_CASE("q-system matrix is similar to the compressible symbol") {
    Matrix4 Q;
    Q << 1, 0, 0, 0,
        0, 1, 0, 0,
        0, 0, 4, -1,
        0, 0, 1, 1;
    for (double xi : {0.05, 0.1, 0.2, 1.0, 3.0}) {
        const Matrix4 lhs = linear::q_system_matrix(xi);
        const Matrix4 rhs = Q * linear::compressible_symbol(xi) * Q.inverse();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("to_q_variables matches the matrix form") {
    linear::Vector4c v;
    v << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(3, 0),
        std::complex<double>(-2, 1);
    const auto q = linear::to_q_variables(v);
    CHECK(q(0) == v(0));
    CHECK(q(1) == v(1));
    CHECK(q(2) == 4.0 * v(2) - v(3));
    CHECK(q(3) == v(2) + v(3));
}

TEST_CASE("lyapunov equivalence and dissipation at low frequency") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double xi : {0.05, 0.1, 0.2}) {
        for (int trial = 0; trial < 100; ++trial) {
            linear::Vector4c q;
            for (int i = 0; i < 4; ++i) q(i) = std::complex<double>(dist(rng), dist(rng));
            const auto sample = linear::lyapunov_dissipation(xi, q);
            const double sumsq = q.squaredNorm();
            CHECK(0.5 * sample.value <= sumsq * (1 + 1e-12));
            CHECK(sumsq <= 2.0 * sample.value * (1 + 1e-12));
            // dL/dt <= -(1/8) |xi|^2 L along the flow
            CHECK(sample.dissipation_rate <= -0.125 * xi * xi * sample.value + 1e-12);
        }
    }
}

TEST_CASE("lyapunov value is non-increasing along the propagator flow") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double xi : {0.05, 0.1, 0.2}) {
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::Vector4cd v0;
            for (int i = 0; i < 4; ++i) v0(i) = std::complex<double>(dist(rng), dist(rng));
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 40; ++k) {
                const double t = k * 0.5;
                const Eigen::Vector4cd vt =
                    linear::propagator(t, xi).cast<std::complex<double>>() * v0;
                const double L = linear::lyapunov_value(xi, linear::to_q_variables(vt));
                CHECK(L <= prev * (1 + 1e-10) + 1e-300);
                prev = L;
            }
        }
    }
}

TEST_CASE("operator norm agrees with a known matrix") {
    Matrix4 M = Matrix4::Zero();
    M(0, 0) = 3.0;
    M(1, 2) = -4.0;
    CHECK(linear::operator_norm(M) == doctest::Approx(4.0).epsilon(1e-12));
}
