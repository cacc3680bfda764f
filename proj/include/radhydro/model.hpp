#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "radhydro/field.hpp"
#include "radhydro/params.hpp"

namespace radhydro::model {

/// Lower bound on 1 + rho enforced at every nonlinear evaluation; the
/// operational stand-in for the a-priori tube 1/2 <= 1+rho <= 3/2.
inline constexpr double kDefaultEpsPos = 0.25;

/// g(rho) = 1/(1+rho) - 1 and h(rho) = 1/(1+rho).
inline std::pair<double, double> coeff_functions(double rho_value,
                                                 double eps_pos = kDefaultEpsPos) {
    const double one_plus = 1.0 + rho_value;
    if (one_plus < eps_pos)
        throw std::domain_error("coeff_functions: 1+rho left the admissible tube");
    const double h = 1.0 / one_plus;
    return {h - 1.0, h};
}

/// Perturbation state (rho, u, theta, eta) around the equilibrium
/// (1, 0, 1, 1). Fields are real in physical space; operations preserve the
/// conjugate symmetry of the spectral data.
struct PerturbationState {
    ScalarField rho;
    VectorField vel;
    ScalarField theta;
    ScalarField eta;

    PerturbationState() = default;
    explicit PerturbationState(const GridPtr& grid)
        : rho(grid), vel(make_vector_field(grid)), theta(grid), eta(grid) {}

    const GridPtr& grid() const { return rho.grid(); }

    PerturbationState& operator+=(const PerturbationState& o) {
        rho += o.rho;
        for (int i = 0; i < 3; ++i) vel[i] += o.vel[i];
        theta += o.theta;
        eta += o.eta;
        return *this;
    }
    PerturbationState& operator*=(double s) {
        rho *= s;
        for (int i = 0; i < 3; ++i) vel[i] *= s;
        theta *= s;
        eta *= s;
        return *this;
    }
    friend PerturbationState operator*(double s, PerturbationState st) { return st *= s; }
    friend PerturbationState operator+(PerturbationState a, const PerturbationState& b) {
        return a += b;
    }

    void to_spectral() {
        rho.to_spectral();
        for (auto& c : vel) c.to_spectral();
        theta.to_spectral();
        eta.to_spectral();
    }

    double min_one_plus_rho() const { return 1.0 + rho.min_real(); }
    bool admissible(double eps_pos = kDefaultEpsPos) const {
        return min_one_plus_rho() >= eps_pos;
    }

    /// sqrt(sum of squared H^2 norms over all six components).
    double h2_norm() const;
};

struct NonlinearTerms {
    ScalarField n1;
    VectorField n2;
    ScalarField n3;
    ScalarField n4;

    explicit NonlinearTerms(const GridPtr& grid)
        : n1(grid), n2(make_vector_field(grid)), n3(grid), n4(grid) {}
};

/// Tangent vector d/dt (rho, u, theta, eta); same shape as the state.
using StateTangent = PerturbationState;

/// The variable change T: G = 4 theta - eta, F = theta + eta, which
/// diagonalizes the zero-order theta/eta coupling.
struct DiagonalizedPair {
    ScalarField g_var;  // G
    ScalarField f_var;  // F
};

inline DiagonalizedPair diagonalize(const ScalarField& theta, const ScalarField& eta) {
    DiagonalizedPair p{ScalarField(theta.grid()), ScalarField(theta.grid())};
    ScalarField th = theta.as_spectral(), et = eta.as_spectral();
    for (std::size_t i = 0; i < th.size(); ++i) {
        p.g_var[i] = 4.0 * th[i] - et[i];
        p.f_var[i] = th[i] + et[i];
    }
    return p;
}

inline DiagonalizedPair diagonalize(const PerturbationState& state) {
    return diagonalize(state.theta, state.eta);
}

/// Inverse: theta = (G+F)/5, eta = (4F-G)/5.
inline std::pair<ScalarField, ScalarField> undiagonalize(const DiagonalizedPair& p) {
    ScalarField theta(p.g_var.grid()), eta(p.g_var.grid());
    ScalarField g = p.g_var.as_spectral(), f = p.f_var.as_spectral();
    for (std::size_t i = 0; i < g.size(); ++i) {
        theta[i] = (g[i] + f[i]) / 5.0;
        eta[i] = (4.0 * f[i] - g[i]) / 5.0;
    }
    return {std::move(theta), std::move(eta)};
}

namespace detail {

/// Multiply two physical-rep fields pointwise into `out` (physical rep).
inline void mul_into(ScalarField& out, const ScalarField& a, const ScalarField& b) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = cplx(a[i].real() * b[i].real(), 0.0);
}

}  // namespace detail

/// Evaluate N1..N4 of the perturbation system. Derivatives are spectral;
/// products are formed pointwise in physical space and the results are
/// dealiased (2/3 rule) on the way back to spectral space.
inline NonlinearTerms nonlinear_terms(const PerturbationState& state,
                                      const ModelParameters& params,
                                      double eps_pos = kDefaultEpsPos) {
    params.validate();
    const GridPtr& grid = state.grid();
    const std::size_t N = grid->size();

    // Physical-space copies of the primitive fields and their derivatives.
    ScalarField rho = state.rho.as_physical();
    ScalarField theta = state.theta.as_physical();
    ScalarField eta = state.eta.as_physical();
    VectorField u = {state.vel[0].as_physical(), state.vel[1].as_physical(),
                     state.vel[2].as_physical()};

    double min_one_plus = 1.0;
    {
        double m = rho[0].real();
        for (std::size_t i = 0; i < N; ++i) m = std::min(m, rho[i].real());
        min_one_plus = 1.0 + m;
    }
    if (min_one_plus < eps_pos)
        throw std::domain_error("nonlinear_terms: state left the admissible tube");

    // grad u (9 components), physical.
    std::array<std::array<ScalarField, 3>, 3> du;  // du[i][j] = d u_i / d x_j
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) du[i][j] = derivative(state.vel[i], j).as_physical();

    VectorField grad_rho = {derivative(state.rho, 0).as_physical(),
                            derivative(state.rho, 1).as_physical(),
                            derivative(state.rho, 2).as_physical()};
    VectorField grad_theta = {derivative(state.theta, 0).as_physical(),
                              derivative(state.theta, 1).as_physical(),
                              derivative(state.theta, 2).as_physical()};
    ScalarField lap_theta = laplacian(state.theta).as_physical();

    // Viscous/coupling combination Delta u + 2 grad div u - grad eta, physical.
    ScalarField div_u_spec = divergence(state.vel);
    VectorField visc;
    for (int i = 0; i < 3; ++i) {
        ScalarField c = laplacian(state.vel[i]);
        c += 2.0 * derivative(div_u_spec, i);
        c -= derivative(state.eta, i);
        visc[i] = c.as_physical();
    }
    ScalarField div_u = div_u_spec.as_physical();

    NonlinearTerms out(grid);
    ScalarField n1(grid, ScalarField::Rep::physical);
    VectorField n2 = make_vector_field(grid, ScalarField::Rep::physical);
    ScalarField n3(grid, ScalarField::Rep::physical);
    ScalarField n4(grid, ScalarField::Rep::physical);

    for (std::size_t p = 0; p < N; ++p) {
        const double r = rho[p].real();
        const double th = theta[p].real();
        const double h = 1.0 / (1.0 + r);
        const double g = h - 1.0;
        const double divu = div_u[p].real();

        // N1 = -rho div u - grad rho . u
        double grad_rho_dot_u = 0.0;
        for (int i = 0; i < 3; ++i) grad_rho_dot_u += grad_rho[i][p].real() * u[i][p].real();
        n1[p] = cplx(-r * divu - grad_rho_dot_u, 0.0);

        // N2 = -u.grad u - (g + h theta) grad rho + g (Delta u + 2 grad div u - grad eta)
        for (int i = 0; i < 3; ++i) {
            double adv = 0.0;
            for (int j = 0; j < 3; ++j) adv += u[j][p].real() * du[i][j][p].real();
            const double v = -adv - (g + h * th) * grad_rho[i][p].real() +
                             g * visc[i][p].real();
            n2[i][p] = cplx(v, 0.0);
        }

        // D.D with D_ij = (d_i u_j + d_j u_i)/2
        double ddot = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double dij = 0.5 * (du[i][j][p].real() + du[j][i][p].real());
                ddot += dij * dij;
            }

        const double etap = eta[p].real();
        const double theta_poly = ((th + 4.0) * th + 6.0) * th * th;  // th^4+4th^3+6th^2
        double u_dot_grad_theta = 0.0;
        for (int i = 0; i < 3; ++i) u_dot_grad_theta += u[i][p].real() * grad_theta[i][p].real();

        // N3 = g (Delta theta + eta - 4 theta) - theta div u - u.grad theta
        //      + h ((div u)^2 + 2 D.D - theta^4 - 4 theta^3 - 6 theta^2)
        const double n3v = g * (lap_theta[p].real() + etap - 4.0 * th) - th * divu -
                           u_dot_grad_theta + h * (divu * divu + 2.0 * ddot - theta_poly);
        n3[p] = cplx(n3v, 0.0);
        n4[p] = cplx(theta_poly, 0.0);
    }

    auto finalize = [&](ScalarField& phys, ScalarField& dst) {
        phys.to_spectral();
        phys.grid()->apply_dealias_mask(phys.data().data());
        dst = std::move(phys);
    };
    finalize(n1, out.n1);
    for (int i = 0; i < 3; ++i) finalize(n2[i], out.n2[i]);
    finalize(n3, out.n3);
    finalize(n4, out.n4);
    return out;
}

/// Linear part of the dynamics: d/dt (rho,u,theta,eta) with N = 0.
inline StateTangent rhs_linear(const PerturbationState& state) {
    const GridPtr& grid = state.grid();
    StateTangent t(grid);

    ScalarField div_u = divergence(state.vel);
    t.rho = -1.0 * div_u;
    for (int i = 0; i < 3; ++i) {
        ScalarField c = laplacian(state.vel[i]);
        c += 2.0 * derivative(div_u, i);
        c -= derivative(state.rho, i);
        c -= derivative(state.theta, i);
        c -= derivative(state.eta, i);
        t.vel[i] = std::move(c);
    }
    {
        ScalarField c = laplacian(state.theta);
        c -= div_u;
        c -= 4.0 * state.theta.as_spectral();
        c += state.eta.as_spectral();
        t.theta = std::move(c);
    }
    {
        ScalarField c = laplacian(state.eta);
        c -= state.eta.as_spectral();
        c += 4.0 * state.theta.as_spectral();
        t.eta = std::move(c);
    }
    return t;
}

/// Full right-hand side: linear part plus N1..N4.
inline StateTangent rhs_full(const PerturbationState& state, const ModelParameters& params,
                             double eps_pos = kDefaultEpsPos) {
    StateTangent t = rhs_linear(state);
    NonlinearTerms n = nonlinear_terms(state, params, eps_pos);
    t.rho += n.n1;
    for (int i = 0; i < 3; ++i) t.vel[i] += n.n2[i];
    t.theta += n.n3;
    t.eta += n.n4;
    return t;
}

}  // namespace radhydro::model

namespace radhydro::model {

inline double PerturbationState::h2_norm() const {
    auto h2sq = [](const ScalarField& f) {
        double acc = 0.0;
        ScalarField s = f.as_spectral();
        s.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
            acc += (1.0 + k2 + k2 * k2) * std::norm(s[idx]);
        });
        return acc * f.grid()->box_volume();
    };
    double total = h2sq(rho) + h2sq(theta) + h2sq(eta);
    for (const auto& c : vel) total += h2sq(c);
    return std::sqrt(total);
}

}  // namespace radhydro::model
