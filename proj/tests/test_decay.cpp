#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "radhydro/decay.hpp"

using namespace radhydro;
using decay::Band;

TEST_CASE("gaussian shear norm matches the closed-form law") {
    // shear0 = e^{-r^2/2} alone: ||u(t)||^2 = pi^{3/2} (1+2t)^{-3/2}
    decay::DecayExperimentConfig cfg;
    cfg.rho0 = decay::zero_profile();
    cfg.d0 = decay::zero_profile();
    cfg.theta0 = decay::zero_profile();
    cfg.eta0 = decay::zero_profile();
    cfg.shear0 = decay::gaussian_profile();

    const decay::NormTable table = decay::evolve_radial(cfg);
    for (std::size_t i = 0; i < table.t.size(); ++i) {
        const double t = table.t[i];
        const double exact = std::pow(M_PI, 0.75) * std::pow(1.0 + 2.0 * t, -0.75);
        CHECK(table.series(Band::all, 0)[i] == doctest::Approx(exact).epsilon(1e-6));
    }
    CHECK(!table.truncation_warning);
}

TEST_CASE("generic data reproduces the -3/4 - m/2 slopes") {
    decay::DecayExperimentConfig cfg;
    const decay::NormTable table = decay::evolve_radial(cfg);
    for (int m = 0; m <= 2; ++m) {
        const decay::DecayFit fit = decay::fit_exponent(
            table.t, table.series(Band::all, m), cfg.fit_window_lo, cfg.fit_window_hi, m);
        const double expected = -0.75 - 0.5 * m;
        INFO("m = ", m, " slope = ", fit.slope, " R2 = ", fit.r_squared);
        CHECK(std::abs(fit.slope - expected) <= 0.05);
        CHECK(fit.conclusive);
        CHECK(fit.r_squared >= 0.999);
    }
    CHECK(cfg.l1_type_data());
}

TEST_CASE("low band carries the algebraic decay, high band dies exponentially") {
    decay::DecayExperimentConfig cfg;
    const decay::NormTable table = decay::evolve_radial(cfg);

    const decay::DecayFit low = decay::fit_exponent(table.t, table.series(Band::low, 0),
                                                    cfg.fit_window_lo, cfg.fit_window_hi, 0);
    CHECK(std::abs(low.slope - (-0.75)) <= 0.05);

    // high band: supported in |xi| >= R0/2 = 1, so the decay is at least
    // e^{-c t}; by t = 50 nothing measurable remains
    const auto& high = table.series(Band::high, 0);
    const auto& all = table.series(Band::all, 0);
    std::size_t i50 = 0;
    while (i50 + 1 < table.t.size() && table.t[i50] < 50.0) ++i50;
    CHECK(high[i50] < 1e-6 * all[0]);
    std::size_t i200 = 0;
    while (i200 + 1 < table.t.size() && table.t[i200] < 200.0) ++i200;
    CHECK(high[i200] < 1e-12 * all[0]);

    // the medium band reaches down to |xi| = r0/2 = 0.1 where the gap is
    // ~ |xi|^2/2, so its exponential decay only bites on the long horizon
    const std::size_t last = table.t.size() - 1;  // t = 1e4
    CHECK(table.series(Band::medium, 0)[last] < 1e-12 * all[0]);
}

TEST_CASE("moment-free data decays strictly faster than generic") {
    decay::DecayExperimentConfig cfg;
    cfg.rho0 = decay::moment_free_profile();
    cfg.d0 = decay::moment_free_profile();
    cfg.theta0 = decay::moment_free_profile();
    cfg.eta0 = decay::moment_free_profile();
    cfg.shear0 = decay::moment_free_profile();
    CHECK(!cfg.l1_type_data());

    const decay::NormTable table = decay::evolve_radial(cfg);
    const decay::DecayFit fit = decay::fit_exponent(table.t, table.series(Band::all, 0),
                                                    cfg.fit_window_lo, cfg.fit_window_hi, 0);
    // |U(0, r)| ~ r near zero buys an extra half power of t
    CHECK(fit.slope < -1.0);
}

TEST_CASE("truncation warning fires for data that does not fit the domain") {
    decay::DecayExperimentConfig cfg;
    cfg.rho0 = decay::zero_profile();
    cfg.d0 = decay::zero_profile();
    cfg.theta0 = decay::zero_profile();
    cfg.eta0 = decay::zero_profile();
    cfg.shear0 = [](double) { return 1.0; };  // no decay in frequency
    const decay::NormTable table = decay::evolve_radial(cfg);
    CHECK(table.truncation_warning);
}

TEST_CASE("fit_exponent recovers an exact power law") {
    std::vector<double> t = decay::DecayExperimentConfig::log_time_grid(1.0, 1e4, 40);
    std::vector<double> y;
    for (double ti : t) y.push_back(2.5 * std::pow(1.0 + ti, -1.25));
    const decay::DecayFit fit = decay::fit_exponent(t, y, 10.0, 1e4, 1);
    CHECK(fit.slope == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.conclusive);
}

TEST_CASE("fit_exponent validates its window and data") {
    std::vector<double> t = {1, 2, 3};
    std::vector<double> y = {1, 1};
    CHECK_THROWS_AS(decay::fit_exponent(t, y, 0.5, 5.0), std::invalid_argument);
    y = {1, 0.0, 1};
    CHECK_THROWS_AS(decay::fit_exponent(t, y, 0.5, 5.0), std::invalid_argument);
    y = {1, 1, 1};
    CHECK_THROWS_AS(decay::fit_exponent(t, y, 5.0, 0.5), std::invalid_argument);
    // too few points in window
    CHECK_THROWS_AS(decay::fit_exponent(t, y, 0.5, 5.0), std::invalid_argument);
}

TEST_CASE("log time grid validation") {
    CHECK_THROWS_AS(decay::DecayExperimentConfig::log_time_grid(0.0, 10.0, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay::DecayExperimentConfig::log_time_grid(1.0, 0.5, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay::DecayExperimentConfig::log_time_grid(1.0, 10.0, 1),
                    std::invalid_argument);
    const auto t = decay::DecayExperimentConfig::log_time_grid(1.0, 100.0, 3);
    CHECK(t.size() == 3);
    CHECK(t[0] == doctest::Approx(1.0));
    CHECK(t[1] == doctest::Approx(10.0));
    CHECK(t[2] == doctest::Approx(100.0));
}

TEST_CASE("rational arithmetic") {
    using decay::Rational;
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -4) == Rational(3, 4));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(-3, 4).str() == "-3/4");
    CHECK(Rational(-3, 4).value() == doctest::Approx(-0.75));
}

TEST_CASE("snap_to_quarter") {
    using decay::Rational;
    CHECK(decay::snap_to_quarter(-0.76) == Rational(-3, 4));
    CHECK(decay::snap_to_quarter(-1.23) == Rational(-5, 4));
    CHECK(decay::snap_to_quarter(-1.74) == Rational(-7, 4));
    CHECK_THROWS_AS(decay::snap_to_quarter(-0.62), std::domain_error);
}

TEST_CASE("lp rate table golden values") {
    using decay::Rational;
    const auto table = decay::lp_rate_table(-0.751, -1.249, -1.752);
    CHECK(table.m_rate[0] == Rational(-3, 4));
    CHECK(table.m_rate[1] == Rational(-5, 4));
    CHECK(table.m_rate[2] == Rational(-7, 4));

    auto find = [&](const std::string& q, int p) -> Rational {
        for (const auto& e : table.entries)
            if (e.quantity == q && e.p == p) return e.rate;
        FAIL("missing entry ", q, " p=", p);
        return Rational();
    };
    CHECK(find("U_Lp", 2) == Rational(-3, 4));
    CHECK(find("U_Lp", 3) == Rational(-1, 1));
    CHECK(find("U_Lp", 4) == Rational(-9, 8));
    CHECK(find("U_Lp", 6) == Rational(-5, 4));
    CHECK(find("U_Lp", 8) == Rational(-21, 16));
    CHECK(find("U_Lp", 0) == Rational(-3, 2));  // p = infinity
    CHECK(find("gradU_Lp", 2) == Rational(-5, 4));
    CHECK(find("gradU_Lp", 3) == Rational(-3, 2));
    CHECK(find("gradU_Lp", 4) == Rational(-13, 8));
    CHECK(find("gradU_Lp", 6) == Rational(-7, 4));
    CHECK(find("dt_rho_u", 2) == Rational(-5, 4));
    CHECK(find("dt_theta_eta", 2) == Rational(-3, 4));
}

TEST_CASE("lp rate interpolation rejects bad p") {
    decay::Rational r[3] = {{-3, 4}, {-5, 4}, {-7, 4}};
    CHECK_THROWS_AS(decay::lp_rate(r, 1), std::domain_error);
    CHECK_THROWS_AS(decay::lp_gradient_rate(r, 8), std::domain_error);
    CHECK_THROWS_AS(decay::lp_gradient_rate(r, 1), std::domain_error);
}

TEST_CASE("empty time grid is rejected") {
    decay::DecayExperimentConfig cfg;
    cfg.t_grid.clear();
    CHECK_THROWS_AS(decay::evolve_radial(cfg), std::invalid_argument);
}
