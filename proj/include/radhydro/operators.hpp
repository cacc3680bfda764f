#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "radhydro/cutoff.hpp"
#include "radhydro/field.hpp"

namespace radhydro {

/// Lambda^s: the spectral multiplier |xi|^s. For s < 0 the zero mode is
/// required to vanish (quotient convention for mean-free perturbations);
/// the zero mode is annihilated either way.
inline ScalarField fractional_laplacian(const ScalarField& f, double s,
                                        double mean_tolerance = 1e-12) {
    ScalarField g = f.as_spectral();
    if (s < 0.0) {
        const double scale = std::sqrt(static_cast<double>(g.size()));
        if (std::abs(g[0]) > mean_tolerance * std::max(1.0, scale))
            throw std::domain_error(
                "fractional_laplacian: negative order requires a mean-free field");
    }
    g.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
        if (k2 == 0.0) {
            g[idx] = cplx(0.0, 0.0);
        } else {
            g[idx] *= std::pow(k2, 0.5 * s);
        }
    });
    return g;
}

inline VectorField fractional_laplacian(const VectorField& u, double s) {
    return {fractional_laplacian(u[0], s), fractional_laplacian(u[1], s),
            fractional_laplacian(u[2], s)};
}

/// ||Lambda^m f||_{L2}, computed spectrally. m = 0 is the plain L2 norm.
inline double sobolev_seminorm(const ScalarField& f, int m) {
    if (m < 0) throw std::invalid_argument("sobolev_seminorm: m must be >= 0");
    ScalarField s = f.as_spectral();
    double acc = 0.0, comp = 0.0;
    s.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
        const double w = (m == 0) ? 1.0 : std::pow(k2, m);
        const double term = w * std::norm(s[idx]);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    });
    return std::sqrt(std::max(0.0, acc * f.grid()->box_volume()));
}

/// H^k norm as the l2 roll-up of the seminorms 0..k.
inline double sobolev_norm(const ScalarField& f, int k) {
    double acc = 0.0;
    for (int m = 0; m <= k; ++m) {
        const double s = sobolev_seminorm(f, m);
        acc += s * s;
    }
    return std::sqrt(acc);
}

inline double sobolev_seminorm(const VectorField& u, int m) {
    const double a = sobolev_seminorm(u[0], m);
    const double b = sobolev_seminorm(u[1], m);
    const double c = sobolev_seminorm(u[2], m);
    return std::sqrt(a * a + b * b + c * c);
}

// ---------------------------------------------------------------------------
// Hodge decomposition

struct HodgeParts {
    ScalarField d;   // compressible potential, d = Lambda^{-1} div u
    VectorField pu;  // incompressible part, Lambda^{-1} curl u (axial form)
    bool had_mean = false;
};

/// Split u into d = Lambda^{-1} div u and Pu = Lambda^{-1} curl u.
/// The zero mode carries no direction and is annihilated; `strict` turns a
/// nonzero mean into an error instead of a flag.
inline HodgeParts hodge_split(const VectorField& u, bool strict = false) {
    const GridPtr& grid = u[0].grid();
    VectorField us = {u[0].as_spectral(), u[1].as_spectral(), u[2].as_spectral()};
    HodgeParts out{ScalarField(grid), make_vector_field(grid), false};

    const double mean = std::abs(us[0][0]) + std::abs(us[1][0]) + std::abs(us[2][0]);
    out.had_mean = mean > 1e-12;
    if (out.had_mean && strict)
        throw std::domain_error("hodge_split: field has nonzero mean in strict mode");

    grid->for_each_mode([&](std::size_t idx, double kx, double ky, double kz, double k2) {
        if (k2 == 0.0) return;
        const double inv = 1.0 / std::sqrt(k2);
        const cplx ux = us[0][idx], uy = us[1][idx], uz = us[2][idx];
        const cplx I(0.0, 1.0);
        out.d[idx] = I * (kx * ux + ky * uy + kz * uz) * inv;
        // Lambda^{-1} (curl u) as the axial vector of the paper's curl tensor.
        out.pu[0][idx] = I * (ky * uz - kz * uy) * inv;
        out.pu[1][idx] = I * (kz * ux - kx * uz) * inv;
        out.pu[2][idx] = I * (kx * uy - ky * ux) * inv;
    });
    return out;
}

/// Rebuild u = -Lambda^{-1} grad d - Lambda^{-1} curl(Pu); with the axial
/// storage of Pu the second term is Lambda^{-1} (i k x Pu).
inline VectorField hodge_reconstruct(const HodgeParts& parts) {
    const GridPtr& grid = parts.d.grid();
    ScalarField d = parts.d.as_spectral();
    VectorField w = {parts.pu[0].as_spectral(), parts.pu[1].as_spectral(),
                     parts.pu[2].as_spectral()};
    VectorField u = make_vector_field(grid);
    grid->for_each_mode([&](std::size_t idx, double kx, double ky, double kz, double k2) {
        if (k2 == 0.0) return;
        const double inv = 1.0 / std::sqrt(k2);
        const cplx I(0.0, 1.0);
        const cplx dd = d[idx];
        u[0][idx] = -I * kx * dd * inv + I * (ky * w[2][idx] - kz * w[1][idx]) * inv;
        u[1][idx] = -I * ky * dd * inv + I * (kz * w[0][idx] - kx * w[2][idx]) * inv;
        u[2][idx] = -I * kz * dd * inv + I * (kx * w[1][idx] - ky * w[0][idx]) * inv;
    });
    return u;
}

/// The compressible component of u as a vector field: -Lambda^{-1} grad d.
inline VectorField hodge_compressible(const HodgeParts& parts) {
    HodgeParts only{parts.d, make_vector_field(parts.d.grid()), false};
    return hodge_reconstruct(only);
}

// ---------------------------------------------------------------------------
// Bernstein-type inequality report

struct BernsteinEntry {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct BernsteinReport {
    std::vector<BernsteinEntry> entries;
    bool all_hold = true;
};

/// Evaluate the six band-limited norm comparisons for the l/m/h parts of f
/// at derivative orders (k, k0, k1), k0 <= k <= k1. Each inequality is
/// allowed a 1+1e-10 relative fudge.
inline BernsteinReport bernstein_check(const ScalarField& f, const CutoffPair& cut, int k, int k0,
                                       int k1) {
    if (!(k0 <= k && k <= k1))
        throw std::invalid_argument("bernstein_check: require k0 <= k <= k1");
    const double fudge = 1.0 + 1e-10;
    FrequencySplit parts = frequency_split(f, cut);

    const double fl_k = sobolev_seminorm(parts.low, k);
    const double fl_k0 = sobolev_seminorm(parts.low, k0);
    const double fh_k = sobolev_seminorm(parts.high, k);
    const double fh_k1 = sobolev_seminorm(parts.high, k1);
    const double fm_0 = sobolev_seminorm(parts.medium, 0);
    const double fm_k = sobolev_seminorm(parts.medium, k);
    const double f_k = sobolev_seminorm(f, k);

    BernsteinReport rep;
    auto add = [&](std::string name, double lhs, double rhs) {
        const bool holds = lhs <= rhs * fudge + 1e-300;
        rep.entries.push_back({std::move(name), lhs, rhs, holds});
        rep.all_hold = rep.all_hold && holds;
    };
    add("low_ratio", fl_k, std::pow(cut.r0, k - k0) * fl_k0);
    add("low_bound", fl_k, f_k);
    add("high_ratio", fh_k, std::pow(cut.R0, -(k1 - k)) * fh_k1);
    add("high_bound", fh_k, f_k);
    add("medium_lower", std::pow(cut.r0, k) * fm_0, fm_k);
    add("medium_upper", fm_k, std::pow(cut.R0, k) * fm_0);
    add("medium_bound", fm_k, f_k);
    return rep;
}

}  // namespace radhydro
