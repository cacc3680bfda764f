#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace radhydro::linear {

using Matrix4 = Eigen::Matrix4d;
using Matrix6c = Eigen::Matrix<std::complex<double>, 6, 6>;
using Vector4c = Eigen::Vector4cd;

/// The 4x4 symbol J(xi) acting on (rho, d, theta, eta); the linearized
/// compressible block evolves as dV/dt = -J V.
inline Matrix4 compressible_symbol(double xi_mag) {
    if (xi_mag < 0.0) throw std::invalid_argument("compressible_symbol: |xi| must be >= 0");
    const double r = xi_mag, s = xi_mag * xi_mag;
    Matrix4 J;
    J << 0.0, r, 0.0, 0.0,
        -r, 3.0 * s, -r, -r,
        0.0, r, s + 4.0, -1.0,
        0.0, 0.0, -4.0, s + 1.0;
    return J;
}

/// The full 6x6 symbol A_xi on (rho, u, theta, eta); dU/dt = -A_xi U.
inline Matrix6c full_symbol(const Eigen::Vector3d& xi) {
    const std::complex<double> I(0.0, 1.0);
    const double s = xi.squaredNorm();
    Matrix6c A = Matrix6c::Zero();
    for (int j = 0; j < 3; ++j) {
        A(0, 1 + j) = I * xi[j];
        A(1 + j, 0) = I * xi[j];
        A(1 + j, 4) = I * xi[j];
        A(1 + j, 5) = I * xi[j];
        A(4, 1 + j) = I * xi[j];
        for (int i = 0; i < 3; ++i)
            A(1 + i, 1 + j) = (i == j ? s : 0.0) + 2.0 * xi[i] * xi[j];
    }
    A(4, 4) = s + 4.0;
    A(4, 5) = -1.0;
    A(5, 4) = -4.0;
    A(5, 5) = s + 1.0;
    return A;
}

/// Coefficients (a0..a4) of det(lambda I - J) = a0 l^4 - a1 l^3 + a2 l^2
/// - a3 l + a4, in closed form; s = |xi|^2.
inline std::array<double, 5> characteristic_coefficients(double xi_mag) {
    if (xi_mag < 0.0) throw std::invalid_argument("characteristic_coefficients: |xi| >= 0");
    const double s = xi_mag * xi_mag;
    return {1.0,
            5.0 * s + 5.0,
            7.0 * s * s + 22.0 * s,
            3.0 * s * s * s + 18.0 * s * s + 10.0 * s,
            s * s * s + 5.0 * s * s};
}

/// Independent route: elementary symmetric functions of J's eigenvalues via
/// the Faddeev-LeVerrier recursion on the matrix itself.
inline std::array<double, 5> characteristic_coefficients_from_matrix(const Matrix4& J) {
    // The recursion yields det(l I - J) = l^4 - c1 l^3 - c2 l^2 - c3 l - c4;
    // converting to the alternating-sign convention l^4 - a1 l^3 + a2 l^2
    // - a3 l + a4 negates the even coefficients.
    std::array<double, 5> e{1.0, 0.0, 0.0, 0.0, 0.0};
    Matrix4 Mk = Matrix4::Identity();
    for (int k = 1; k <= 4; ++k) {
        Matrix4 JM = J * Mk;
        const double ck = JM.trace() / k;
        Mk = JM - ck * Matrix4::Identity();
        e[k] = (k % 2 == 0) ? -ck : ck;
    }
    return e;
}

enum class StabilityVerdict { stable, marginal };

inline std::string to_string(StabilityVerdict v) {
    return v == StabilityVerdict::stable ? "stable" : "marginal";
}

/// Eigenvalues of J(|xi|), sorted by ascending real part (ties by imaginary
/// part). Computed from the matrix, not from the coefficients.
inline std::array<std::complex<double>, 4> eigenvalues(double xi_mag) {
    Eigen::EigenSolver<Matrix4> es(compressible_symbol(xi_mag));
    std::array<std::complex<double>, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

struct HurwitzReport {
    double xi_mag = 0.0;
    std::array<double, 5> coefficients{};  // a0..a4
    std::array<double, 4> minors{};        // A1..A4
    std::array<std::complex<double>, 4> eigs{};
    double kappa_gap = 0.0;  // min real part of the eigenvalues
    StabilityVerdict verdict = StabilityVerdict::marginal;
};

/// Hurwitz leading minors of h(l) = a0 l^4 - a1 l^3 + a2 l^2 - a3 l + a4.
/// All four positive iff every eigenvalue of J has positive real part; the
/// verdict is cross-validated against the eigenvalues.
inline HurwitzReport hurwitz_determinants(double xi_mag) {
    HurwitzReport rep;
    rep.xi_mag = xi_mag;
    rep.coefficients = characteristic_coefficients(xi_mag);
    const auto& a = rep.coefficients;
    rep.minors[0] = a[1];
    rep.minors[1] = a[1] * a[2] - a[0] * a[3];
    rep.minors[2] = a[1] * a[2] * a[3] - a[1] * a[1] * a[4] - a[0] * a[3] * a[3];
    rep.minors[3] = a[4] * rep.minors[2];
    rep.eigs = eigenvalues(xi_mag);
    rep.kappa_gap = rep.eigs[0].real();

    const bool minors_positive = rep.minors[0] > 0.0 && rep.minors[1] > 0.0 &&
                                 rep.minors[2] > 0.0 && rep.minors[3] > 0.0;
    // xi = 0 keeps three conserved directions; never label it stable.
    rep.verdict = (minors_positive && xi_mag > 0.0) ? StabilityVerdict::stable
                                                    : StabilityVerdict::marginal;
    return rep;
}

/// Hurwitz minors at |xi| = 1 on the exact integer path (a = 1,10,29,31,6).
inline std::array<std::int64_t, 4> hurwitz_minors_unit_integer() {
    const std::int64_t a0 = 1, a1 = 10, a2 = 29, a3 = 31, a4 = 6;
    const std::int64_t A1 = a1;
    const std::int64_t A2 = a1 * a2 - a0 * a3;
    const std::int64_t A3 = a1 * a2 * a3 - a1 * a1 * a4 - a0 * a3 * a3;
    const std::int64_t A4 = a4 * A3;
    return {A1, A2, A3, A4};
}

// ---------------------------------------------------------------------------
// Propagators

/// e^{-t J(|xi|)} by Pade scaling-and-squaring.
inline Matrix4 propagator(double t, double xi_mag) {
    if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
    return Matrix4((-t * compressible_symbol(xi_mag)).exp());
}

/// e^{-t A_xi}, the full 6x6 semigroup.
inline Matrix6c propagator_full(double t, const Eigen::Vector3d& xi) {
    if (t < 0.0) throw std::invalid_argument("propagator_full: t must be >= 0");
    return Matrix6c((-t * full_symbol(xi)).exp());
}

inline double operator_norm(const Matrix4& M) {
    return M.jacobiSvd().singularValues()(0);
}

// ---------------------------------------------------------------------------
// Decay envelope over a frequency band

struct DecayEnvelope {
    double C_fit = 0.0;      // envelope prefactor
    double kappa_fit = 0.0;  // fitted exponential decay rate (positive)
    double min_spectral_gap = 0.0;
    std::vector<double> t;
    std::vector<double> sup_norm;  // sup over the band of ||e^{-tJ}||
};

/// Sample |xi| in [r, R], compute sup_xi ||e^{-tJ(xi)}|| per t and fit
/// log(sup) ~ log(C) - kappa t over the supplied time grid.
inline DecayEnvelope decay_envelope(double r, double R, const std::vector<double>& t_grid,
                                    int xi_samples = 64) {
    if (!(r > 0.0 && r <= R)) throw std::invalid_argument("decay_envelope: require 0 < r <= R");
    if (xi_samples < 1 || t_grid.empty())
        throw std::invalid_argument("decay_envelope: empty sample");

    std::vector<double> xis(xi_samples);
    for (int i = 0; i < xi_samples; ++i)
        xis[i] = (xi_samples == 1) ? r : r + (R - r) * i / double(xi_samples - 1);

    DecayEnvelope env;
    env.t = t_grid;
    env.sup_norm.resize(t_grid.size(), 0.0);
    env.min_spectral_gap = std::numeric_limits<double>::infinity();
    for (double xi : xis) {
        env.min_spectral_gap = std::min(env.min_spectral_gap, eigenvalues(xi)[0].real());
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            env.sup_norm[i] = std::max(env.sup_norm[i], operator_norm(propagator(t_grid[i], xi)));
        }
    }

    // Least squares on (t, log sup_norm).
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = double(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double y = std::log(env.sup_norm[i]);
        st += t_grid[i];
        sy += y;
        stt += t_grid[i] * t_grid[i];
        sty += t_grid[i] * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    env.kappa_fit = -slope;
    env.C_fit = std::exp((sy - slope * st) / n);
    return env;
}

// ---------------------------------------------------------------------------
// Lyapunov functional in the Q-variables (rho, d, g, f) = (rho, d, 4theta-eta,
// theta+eta)

/// Generator of the Q-variable mode system, dv/dt = -Jq v, ordering
/// (rho, d, g, f).
inline Matrix4 q_system_matrix(double xi_mag) {
    const double r = xi_mag, s = xi_mag * xi_mag;
    Matrix4 Jq;
    Jq << 0.0, r, 0.0, 0.0,
        -r, 3.0 * s, 0.0, -r,
        0.0, 4.0 * r, s + 5.0, 0.0,
        0.0, r, 0.0, s;
    return Jq;
}

/// Map a (rho, d, theta, eta) mode vector into (rho, d, g, f).
inline Vector4c to_q_variables(const Vector4c& v) {
    Vector4c q;
    q << v(0), v(1), 4.0 * v(2) - v(3), v(2) + v(3);
    return q;
}

struct LyapunovSample {
    double xi_mag = 0.0;
    Vector4c mode;  // (rho, d, g, f)
    double value = 0.0;
    double dissipation_rate = 0.0;  // instantaneous dL/dt along the flow
};

inline double lyapunov_value(double xi_mag, const Vector4c& q) {
    const double sumsq = q.squaredNorm();
    const double cross = (q(0) * std::conj(q(1))).real();
    return sumsq - xi_mag * cross;
}

/// Evaluate L and its exact time derivative along dv/dt = -Jq v.
inline LyapunovSample lyapunov_dissipation(double xi_mag, const Vector4c& q_mode) {
    LyapunovSample out;
    out.xi_mag = xi_mag;
    out.mode = q_mode;
    out.value = lyapunov_value(xi_mag, q_mode);

    const Matrix4 Jq = q_system_matrix(xi_mag);
    const Vector4c dv = -(Jq * q_mode);
    // dL/dt = 2 Re<v, dv> - |xi| Re(drho conj(d) + rho conj(dd))
    double rate = 2.0 * (q_mode.dot(dv)).real();  // dot conjugates the left arg
    rate -= xi_mag * ((dv(0) * std::conj(q_mode(1))).real() +
                      (q_mode(0) * std::conj(dv(1))).real());
    out.dissipation_rate = rate;
    return out;
}

}  // namespace radhydro::linear
