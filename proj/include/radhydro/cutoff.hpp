#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "radhydro/field.hpp"

namespace radhydro {

/// Transition profile used on the annuli where the cutoffs ramp between 0
/// and 1. Any choice passes the same property suite; the enum exists so the
/// sensitivity can be exercised.
enum class CutoffProfile { smooth_exp, cosine, linear };

inline CutoffProfile cutoff_profile_from_string(const std::string& s) {
    if (s == "smooth_exp") return CutoffProfile::smooth_exp;
    if (s == "cosine") return CutoffProfile::cosine;
    if (s == "linear") return CutoffProfile::linear;
    throw std::invalid_argument("unknown cutoff profile: " + s);
}

/// Monotone ramp from 1 at x<=0 to 0 at x>=1.
inline double cutoff_ramp(double x, CutoffProfile profile) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    switch (profile) {
        case CutoffProfile::smooth_exp: {
            const double a = std::exp(-1.0 / x);
            const double b = std::exp(-1.0 / (1.0 - x));
            return b / (a + b);
        }
        case CutoffProfile::cosine:
            return 0.5 * (1.0 + std::cos(M_PI * x));
        case CutoffProfile::linear:
            return 1.0 - x;
    }
    return 0.0;
}

/// Smooth radial cutoffs phi0, phi1 defining the low/medium/high frequency
/// split: phi0 = 1 on |xi|<=r0/2, 0 beyond r0; phi1 = 0 below R0/2, 1 beyond
/// R0+1. Their supports are disjoint (r0 < 1/4 < R0/2), so the medium weight
/// 1 - phi0 - phi1 stays in [0,1].
struct CutoffPair {
    double r0 = 0.2;
    double R0 = 2.0;
    CutoffProfile profile = CutoffProfile::smooth_exp;

    CutoffPair() = default;
    CutoffPair(double r0_, double R0_, CutoffProfile profile_ = CutoffProfile::smooth_exp)
        : r0(r0_), R0(R0_), profile(profile_) {
        validate();
    }

    void validate() const {
        if (!(r0 > 0.0 && r0 < 0.25))
            throw std::invalid_argument("CutoffPair: require 0 < r0 < 1/4");
        if (!(R0 > 1.0)) throw std::invalid_argument("CutoffPair: require R0 > 1");
    }

    double phi0(double r) const {
        return cutoff_ramp((r - 0.5 * r0) / (0.5 * r0), profile);
    }
    double phi1(double r) const {
        return 1.0 - cutoff_ramp((r - 0.5 * R0) / (R0 + 1.0 - 0.5 * R0), profile);
    }
    double phi_med(double r) const { return 1.0 - phi0(r) - phi1(r); }
};

struct FrequencySplit {
    ScalarField low, medium, high;

    ScalarField low_plus_medium() const { return low + medium; }    // f^L
    ScalarField medium_plus_high() const { return medium + high; }  // f^H
};

/// Multiply each mode by the radial weight w(|k|).
template <typename Weight>
inline ScalarField radial_multiplier(const ScalarField& f, Weight&& w) {
    ScalarField s = f.as_spectral();
    s.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
        s[idx] *= w(std::sqrt(k2));
    });
    return s;
}

/// Exact partition f = f^l + f^m + f^h (the weights sum to 1 pointwise).
inline FrequencySplit frequency_split(const ScalarField& f, const CutoffPair& cut) {
    ScalarField s = f.as_spectral();
    FrequencySplit out{ScalarField(f.grid()), ScalarField(f.grid()), ScalarField(f.grid())};
    s.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
        const double r = std::sqrt(k2);
        const double p0 = cut.phi0(r);
        const double p1 = cut.phi1(r);
        out.low[idx] = s[idx] * p0;
        out.high[idx] = s[idx] * p1;
        out.medium[idx] = s[idx] * (1.0 - p0 - p1);
    });
    return out;
}

inline ScalarField low_part(const ScalarField& f, const CutoffPair& cut) {
    return radial_multiplier(f, [&](double r) { return cut.phi0(r); });
}
inline ScalarField high_part(const ScalarField& f, const CutoffPair& cut) {
    return radial_multiplier(f, [&](double r) { return cut.phi1(r); });
}

}  // namespace radhydro
