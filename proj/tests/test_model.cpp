#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "radhydro/model.hpp"
#include "radhydro/operators.hpp"
#include "radhydro/symbols.hpp"

using namespace radhydro;
using model::PerturbationState;

namespace {

GridPtr grid16() {
    static GridPtr g = make_grid(16, 1.0);
    return g;
}

PerturbationState random_state(const GridPtr& g, std::uint64_t seed, double amplitude,
                               int band = 4) {
    std::mt19937_64 rng(seed);
    PerturbationState st(g);
    auto gen = [&](ScalarField& f) {
        f = random_band_limited(g, band, rng);
        f.to_spectral();
        f[0] = cplx(0.0, 0.0);
        f *= amplitude;
    };
    gen(st.rho);
    for (auto& c : st.vel) gen(c);
    gen(st.theta);
    gen(st.eta);
    return st;
}

}  // namespace

TEST_CASE("coefficient functions g and h") {
    auto [g0, h0] = model::coeff_functions(0.0);
    CHECK(g0 == 0.0);
    CHECK(h0 == 1.0);
    auto [g1, h1] = model::coeff_functions(1.0);
    CHECK(g1 == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(h1 == doctest::Approx(0.5).epsilon(1e-15));
    // g = h - 1 identically
    for (double r : {-0.5, -0.1, 0.3, 2.0}) {
        auto [g, h] = model::coeff_functions(r);
        CHECK(g == doctest::Approx(h - 1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(model::coeff_functions(-0.8), std::domain_error);
}

TEST_CASE("admissibility reflects the physical-space minimum of 1 + rho") {
    GridPtr g = grid16();
    PerturbationState st(g);
    st.rho.fill_physical([](double x, double, double) { return -0.5 * std::cos(x); });
    CHECK(st.min_one_plus_rho() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.admissible(0.25));
    CHECK(!st.admissible(0.6));
}

TEST_CASE("diagonalize and undiagonalize are inverse") {
    GridPtr g = grid16();
    PerturbationState st = random_state(g, 5, 1.0);
    auto pair = model::diagonalize(st);
    auto [theta, eta] = model::undiagonalize(pair);
    ScalarField dth = theta - st.theta.as_spectral();
    ScalarField det = eta - st.eta.as_spectral();
    CHECK(l2_norm(dth) < 1e-13 * std::max(1.0, l2_norm(st.theta)));
    CHECK(l2_norm(det) < 1e-13 * std::max(1.0, l2_norm(st.eta)));
}

TEST_CASE("h2 norm matches the seminorm roll-up") {
    GridPtr g = grid16();
    PerturbationState st = random_state(g, 9, 0.7);
    double acc = 0.0;
    auto add = [&](const ScalarField& f) {
        for (int m = 0; m <= 2; ++m) {
            const double s = sobolev_seminorm(f, m);
            acc += s * s;
        }
    };
    add(st.rho);
    for (const auto& c : st.vel) add(c);
    add(st.theta);
    add(st.eta);
    CHECK(st.h2_norm() == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
}

TEST_CASE("quartic exchange term evaluated on a single low mode") {
    // theta = a cos(x): all products stay below the dealias cutoff, so the
    // pseudo-spectral evaluation is exact.
    GridPtr g = grid16();
    PerturbationState st(g);
    const double a = 0.3;
    st.theta.fill_physical([a](double x, double, double) { return a * std::cos(x); });
    st.rho.to_spectral();

    model::NonlinearTerms n = model::nonlinear_terms(st, ModelParameters{});
    ScalarField n4 = n.n4.as_physical();
    ScalarField n3 = n.n3.as_physical();
    const int nn = g->n();
    const double h = 2.0 * M_PI / nn;
    std::size_t idx = 0;
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j)
            for (int k = 0; k < nn; ++k, ++idx) {
                const double th = a * std::cos(i * h);
                const double poly = th * th * th * th + 4 * th * th * th + 6 * th * th;
                CHECK(n4[idx].real() == doctest::Approx(poly).epsilon(1e-10));
                // with rho = u = 0: N3 = g*(lap th + eta - 4 th) - ... = -h*poly = -poly
                CHECK(n3[idx].real() == doctest::Approx(-poly).epsilon(1e-10));
            }
}

TEST_CASE("mass nonlinearity is a divergence") {
    // N1 = -div(rho u) when both factors are low-mode (no aliasing).
    GridPtr g = grid16();
    PerturbationState st(g);
    st.rho.fill_physical([](double x, double y, double) {
        return 0.2 * std::cos(x) + 0.1 * std::sin(y);
    });
    st.vel[0].fill_physical([](double, double y, double) { return 0.3 * std::sin(y); });
    st.vel[1].fill_physical([](double x, double, double z) {
        return 0.1 * std::cos(x) * std::cos(z);
    });
    st.vel[2].to_spectral();
    st.theta.to_spectral();
    st.eta.to_spectral();

    model::NonlinearTerms n = model::nonlinear_terms(st, ModelParameters{});

    ScalarField rho_p = st.rho.as_physical();
    VectorField prod = make_vector_field(g, ScalarField::Rep::physical);
    for (int c = 0; c < 3; ++c) {
        ScalarField up = st.vel[c].as_physical();
        for (std::size_t i = 0; i < up.size(); ++i)
            prod[c][i] = cplx(rho_p[i].real() * up[i].real(), 0.0);
        prod[c].to_spectral();
    }
    ScalarField expected = divergence(prod);
    expected *= -1.0;
    g->apply_dealias_mask(expected.data().data());

    ScalarField diff = n.n1.as_spectral() - expected;
    CHECK(l2_norm(diff) < 1e-11);
}

TEST_CASE("nonlinear terms vanish quadratically with the amplitude") {
    GridPtr g = grid16();
    auto norm_of = [&](const model::NonlinearTerms& n) {
        double acc = l2_norm(n.n1) + l2_norm(n.n3) + l2_norm(n.n4);
        for (int i = 0; i < 3; ++i) acc += l2_norm(n.n2[i]);
        return acc;
    };
    const double eps1 = 1e-3, eps2 = 5e-4;
    PerturbationState s1 = random_state(g, 77, eps1);
    PerturbationState s2 = random_state(g, 77, eps2);
    const double r1 = norm_of(model::nonlinear_terms(s1, ModelParameters{})) / (eps1 * eps1);
    const double r2 = norm_of(model::nonlinear_terms(s2, ModelParameters{})) / (eps2 * eps2);
    // the quadratic-normalized magnitudes agree to O(eps)
    CHECK(std::abs(r1 - r2) / std::max(r1, r2) < 5e-3);
}

TEST_CASE("nonlinear terms reject states outside the tube") {
    GridPtr g = grid16();
    PerturbationState st(g);
    st.rho.fill_physical([](double x, double, double) { return -0.9 * std::cos(x) * std::cos(x); });
    st.vel[0].to_spectral();
    st.vel[1].to_spectral();
    st.vel[2].to_spectral();
    st.theta.to_spectral();
    st.eta.to_spectral();
    CHECK_THROWS_AS(model::nonlinear_terms(st, ModelParameters{}), std::domain_error);
}

TEST_CASE("linear right-hand side matches the Fourier symbol per mode") {
    GridPtr g = grid16();
    PerturbationState st = random_state(g, 31, 1.0);
    model::StateTangent t = model::rhs_linear(st);
    t.to_spectral();
    PerturbationState ss = st;
    ss.to_spectral();

    double max_err = 0.0;
    g->for_each_mode([&](std::size_t idx, double kx, double ky, double kz, double) {
        Eigen::Matrix<std::complex<double>, 6, 1> U, got;
        U << ss.rho[idx], ss.vel[0][idx], ss.vel[1][idx], ss.vel[2][idx], ss.theta[idx],
            ss.eta[idx];
        got << t.rho[idx], t.vel[0][idx], t.vel[1][idx], t.vel[2][idx], t.theta[idx], t.eta[idx];
        const Eigen::Matrix<std::complex<double>, 6, 1> want =
            -(linear::full_symbol(Eigen::Vector3d(kx, ky, kz)) * U);
        max_err = std::max(max_err, (got - want).cwiseAbs().maxCoeff());
    });
    CHECK(max_err < 1e-11);
}

TEST_CASE("weighted zero-order energy balance closes at the continuous level") {
    // d/dt E = -D + R with E = 1/2 (4||rho||^2 + 4||u||^2 + 4||theta||^2 + ||eta||^2),
    // D = 4||grad u||^2 + 4||grad theta||^2 + ||grad eta||^2 + 8||div u||^2
    //     + ||4 theta - eta||^2,
    // R = -4<u, grad eta> + 4<rho,N1> + 4<u,N2> + 4<theta,N3> + <eta,N4>.
    GridPtr g = grid16();
    PerturbationState st = random_state(g, 55, 1e-2);
    const ModelParameters params;
    model::StateTangent dot = model::rhs_full(st, params);

    const double dE = 4.0 * inner_product(st.rho, dot.rho) +
                      4.0 * inner_product(st.vel, dot.vel) +
                      4.0 * inner_product(st.theta, dot.theta) +
                      inner_product(st.eta, dot.eta);

    const double gu = sobolev_seminorm(st.vel, 1);
    const double gt = sobolev_seminorm(st.theta, 1);
    const double ge = sobolev_seminorm(st.eta, 1);
    const double du = l2_norm(divergence(st.vel));
    auto diag = model::diagonalize(st);
    const double relax = l2_norm(diag.g_var);
    const double D = 4 * gu * gu + 4 * gt * gt + ge * ge + 8 * du * du + relax * relax;

    model::NonlinearTerms n = model::nonlinear_terms(st, params);
    double R = -4.0 * inner_product(st.vel, gradient(st.eta));
    R += 4.0 * inner_product(st.rho, n.n1);
    R += 4.0 * inner_product(st.vel, n.n2);
    R += 4.0 * inner_product(st.theta, n.n3);
    R += inner_product(st.eta, n.n4);

    const double scale = std::max({std::abs(dE), D, 1e-30});
    CHECK(std::abs(dE + D - R) < 1e-10 * scale);
}

TEST_CASE("rhs_full equals rhs_linear plus the nonlinear terms") {
    GridPtr g = grid16();
    PerturbationState st = random_state(g, 61, 1e-2);
    const ModelParameters params;
    model::StateTangent full = model::rhs_full(st, params);
    model::StateTangent lin = model::rhs_linear(st);
    model::NonlinearTerms n = model::nonlinear_terms(st, params);
    lin.rho += n.n1;
    for (int i = 0; i < 3; ++i) lin.vel[i] += n.n2[i];
    lin.theta += n.n3;
    lin.eta += n.n4;

    ScalarField d = full.rho - lin.rho;
    CHECK(l2_norm(d) < 1e-14);
    for (int i = 0; i < 3; ++i) {
        ScalarField dv = full.vel[i] - lin.vel[i];
        CHECK(l2_norm(dv) < 1e-14);
    }
}

TEST_CASE("parameter validation") {
    ModelParameters p;
    CHECK(p.is_normalized());
    CHECK_NOTHROW(p.validate());
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(true), std::invalid_argument);
    p.mu = 1.0;
    p.light_speed = 2.0;
    CHECK(!p.is_normalized());
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_NOTHROW(p.validate(true));
}
