#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "radhydro/cutoff.hpp"
#include "radhydro/quadrature.hpp"
#include "radhydro/symbols.hpp"

namespace radhydro::decay {

using RadialProfile = std::function<double(double)>;

inline RadialProfile gaussian_profile() {
    return [](double r) { return std::exp(-0.5 * r * r); };
}
inline RadialProfile zero_profile() {
    return [](double) { return 0.0; };
}
/// r e^{-r^2}: vanishing integral, decays faster than the generic rate.
inline RadialProfile moment_free_profile() {
    return [](double r) { return r * std::exp(-r * r); };
}

/// Isotropic initial data and evaluation plan for the whole-space linear
/// evolution. The sharp generic rate requires |U(0, r->0)| -> nonzero
/// constant (L1-type data).
struct DecayExperimentConfig {
    RadialProfile rho0 = gaussian_profile();
    RadialProfile d0 = gaussian_profile();
    RadialProfile theta0 = gaussian_profile();
    RadialProfile eta0 = gaussian_profile();
    RadialProfile shear0 = gaussian_profile();

    std::vector<double> t_grid;       // log-spaced by default
    std::array<int, 3> orders{0, 1, 2};
    double fit_window_lo = 1e2;
    double fit_window_hi = 1e4;
    CutoffPair cutoffs{};

    static std::vector<double> log_time_grid(double t_lo, double t_hi, int points) {
        if (!(t_lo > 0.0 && t_hi > t_lo && points >= 2))
            throw std::invalid_argument("log_time_grid: bad range");
        std::vector<double> t(points);
        const double la = std::log(t_lo), lb = std::log(t_hi);
        for (int i = 0; i < points; ++i)
            t[i] = std::exp(la + (lb - la) * i / double(points - 1));
        return t;
    }

    DecayExperimentConfig() { t_grid = log_time_grid(1.0, 1e4, 61); }

    bool l1_type_data() const {
        return std::abs(rho0(0.0)) + std::abs(d0(0.0)) + std::abs(theta0(0.0)) +
                   std::abs(eta0(0.0)) + std::abs(shear0(0.0)) >
               1e-12;
    }
};

enum class Band { all, low, medium, high };

inline std::string to_string(Band b) {
    switch (b) {
        case Band::all: return "all";
        case Band::low: return "low";
        case Band::medium: return "medium";
        case Band::high: return "high";
    }
    return "?";
}

struct NormTable {
    std::vector<double> t;
    // norms[band][m][time index]
    std::array<std::array<std::vector<double>, 3>, 4> norms{};
    bool truncation_warning = false;

    const std::vector<double>& series(Band band, int m) const {
        return norms[static_cast<int>(band)][m];
    }
};

/// Advance the radial mode data through e^{-tJ(r)} (compressible block) and
/// e^{-r^2 t} (shear scalar) at every quadrature node; assemble
/// ||grad^m U(t)||_{L2}^2 = 4 pi sum_j w_j r_j^{2+2m} |U(t, r_j)|^2
/// per frequency band.
inline NormTable evolve_radial(const DecayExperimentConfig& config,
                               const RadialQuadrature& quad = RadialQuadrature()) {
    if (config.t_grid.empty()) throw std::invalid_argument("evolve_radial: empty time grid");
    NormTable table;
    table.t = config.t_grid;
    for (auto& band : table.norms)
        for (auto& v : band) v.assign(config.t_grid.size(), 0.0);

    double tail_sq_m2 = 0.0, total_sq_m2 = 0.0;
    const double four_pi = 4.0 * M_PI;

    for (std::size_t jn = 0; jn < quad.nodes.size(); ++jn) {
        const double r = quad.nodes[jn];
        const double w = quad.weights[jn];
        Eigen::Vector4d v0(config.rho0(r), config.d0(r), config.theta0(r), config.eta0(r));
        const double sh0 = config.shear0(r);

        const double p0 = config.cutoffs.phi0(r);
        const double p1 = config.cutoffs.phi1(r);
        const std::array<double, 4> band_w2 = {1.0, p0 * p0, (1.0 - p0 - p1) * (1.0 - p0 - p1),
                                               p1 * p1};

        // truncation diagnostic from the t = 0 data itself
        {
            const double c = four_pi * w * std::pow(r, 6) * (v0.squaredNorm() + sh0 * sh0);
            total_sq_m2 += c;
            if (r > 0.9 * quad.r_max) tail_sq_m2 += c;
        }

        const linear::Matrix4 J = linear::compressible_symbol(r);
        for (std::size_t it = 0; it < config.t_grid.size(); ++it) {
            const double t = config.t_grid[it];
            const Eigen::Vector4d vt = ((-t * J).exp() * v0).eval();
            const double sh_t = std::exp(-r * r * t) * sh0;
            const double mode_sq = vt.squaredNorm() + sh_t * sh_t;

            double rw = four_pi * w * r * r;  // r^{2+2m} built up per order
            for (int m = 0; m <= 2; ++m) {
                for (int b = 0; b < 4; ++b)
                    table.norms[b][m][it] += rw * band_w2[b] * mode_sq;
                rw *= r * r;
            }
        }
    }

    table.truncation_warning = total_sq_m2 > 0.0 && tail_sq_m2 > 1e-8 * total_sq_m2;
    for (auto& band : table.norms)
        for (auto& v : band)
            for (auto& x : v) x = std::sqrt(std::max(0.0, x));
    return table;
}

struct DecayFit {
    int order = 0;
    double slope = 0.0;      // of log ||.|| vs log(1+t)
    double intercept = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    bool conclusive = false;  // requires R^2 >= 0.999
};

/// Ordinary least squares of log(norm) against log(1+t) over the window.
inline DecayFit fit_exponent(const std::vector<double>& t, const std::vector<double>& norm,
                             double window_lo, double window_hi, int order = 0) {
    if (t.size() != norm.size()) throw std::invalid_argument("fit_exponent: size mismatch");
    if (!(window_hi > window_lo)) throw std::invalid_argument("fit_exponent: degenerate window");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window_lo || t[i] > window_hi) continue;
        if (!(norm[i] > 0.0)) throw std::invalid_argument("fit_exponent: zero norm in window");
        x.push_back(std::log1p(t[i]));
        y.push_back(std::log(norm[i]));
    }
    if (x.size() < 8) throw std::invalid_argument("fit_exponent: need >= 8 points in window");

    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    DecayFit fit;
    fit.order = order;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.conclusive = fit.r_squared >= 0.999;
    return fit;
}

// ---------------------------------------------------------------------------
// L^p rate arithmetic

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::abs(std::gcd(num, den));
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return double(num) / double(den); }
    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

/// Nearest quarter-integer to a measured slope; the theorem rates all live
/// on the 1/4 lattice.
inline Rational snap_to_quarter(double slope, double tol = 0.1) {
    const long long q = llround(slope * 4.0);
    if (std::abs(slope - q / 4.0) > tol)
        throw std::domain_error("snap_to_quarter: slope too far from a theorem rate");
    return Rational(q, 4);
}

struct LpRateEntry {
    std::string quantity;  // "U_Lp", "gradU_Lp", "dt_rho_u", "dt_theta_eta"
    int p = 0;             // 0 encodes p = infinity
    Rational rate;
};

struct LpRateTable {
    Rational m_rate[3];  // snapped L2 rates for m = 0, 1, 2
    std::vector<LpRateEntry> entries;
};

/// ||U||_{L^p} rate via L2/L6 (p <= 6) or L6/Linf (p > 6) interpolation,
/// p = 0 meaning infinity.
inline Rational lp_rate(const Rational r[3], int p) {
    const Rational rate_l2 = r[0];  // -3/4 generically
    const Rational rate_l6 = r[1];  // ||U||_L6 <= C ||grad U||_L2
    if (p == 0) {
        // ||U||_inf <= C ||grad U||^{1/2} ||grad^2 U||^{1/2}
        return Rational(1, 2) * r[1] + Rational(1, 2) * r[2];
    }
    if (p < 2) throw std::domain_error("lp_rate: p must be >= 2");
    if (p <= 6) {
        const Rational zeta(6 - p, 2 * p);
        return zeta * rate_l2 + (Rational(1, 1) + Rational(-zeta.num, zeta.den)) * rate_l6;
    }
    const Rational zeta_p(6, p);
    const Rational linf = Rational(1, 2) * r[1] + Rational(1, 2) * r[2];
    return zeta_p * rate_l6 + (Rational(1, 1) + Rational(-zeta_p.num, zeta_p.den)) * linf;
}

/// ||grad U||_{L^p} rate for 2 <= p <= 6 via eta' = (6-p)/2p interpolation.
inline Rational lp_gradient_rate(const Rational r[3], int p) {
    if (p < 2 || p > 6) throw std::domain_error("lp_gradient_rate: require 2 <= p <= 6");
    const Rational eta(6 - p, 2 * p);
    return eta * r[1] + (Rational(1, 1) + Rational(-eta.num, eta.den)) * r[2];
}

/// Build the full table from measured m = 0,1,2 slopes. The slopes are
/// snapped to the quarter lattice first; the interpolation arithmetic is
/// then exact in rational form.
inline LpRateTable lp_rate_table(double slope_m0, double slope_m1, double slope_m2,
                                 double tol = 0.1) {
    LpRateTable table;
    table.m_rate[0] = snap_to_quarter(slope_m0, tol);
    table.m_rate[1] = snap_to_quarter(slope_m1, tol);
    table.m_rate[2] = snap_to_quarter(slope_m2, tol);

    for (int p : {2, 3, 4, 6, 8, 0})
        table.entries.push_back({"U_Lp", p, lp_rate(table.m_rate, p)});
    for (int p : {2, 3, 4, 6})
        table.entries.push_back({"gradU_Lp", p, lp_gradient_rate(table.m_rate, p)});
    // d/dt (rho, u) from the equations: one derivative of U -> -5/4.
    table.entries.push_back({"dt_rho_u", 2, table.m_rate[1]});
    // d/dt (theta, eta) carries the zero-order relaxation 4 theta - eta -> -3/4.
    table.entries.push_back({"dt_theta_eta", 2, table.m_rate[0]});
    return table;
}

}  // namespace radhydro::decay
