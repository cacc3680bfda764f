#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "radhydro/cutoff.hpp"
#include "radhydro/model.hpp"
#include "radhydro/operators.hpp"
#include "radhydro/symbols.hpp"

namespace radhydro::sim {

using model::PerturbationState;

enum class Integrator { if_rk2, imex_euler };

inline Integrator integrator_from_string(const std::string& s) {
    if (s == "if-rk2") return Integrator::if_rk2;
    if (s == "imex-euler") return Integrator::imex_euler;
    throw std::invalid_argument("unknown integrator: " + s);
}

struct SimConfig {
    int n = 32;
    double box_len = 4.0;
    double dt = 0.02;
    double t_end = 50.0;
    Integrator integrator = Integrator::if_rk2;
    double amplitude = 1e-3;  // initial H^2 norm
    CutoffPair cutoffs{};
    int monitor_cadence = 5;  // steps between monitor samples
    std::uint64_t seed = 1;
    double eps_pos = model::kDefaultEpsPos;
    double coupling_coeff = 0.05;  // plays lambda_2/8 in the H functional

    void validate() const {
        cutoffs.validate();
        if (!(dt > 0.0 && t_end > 0.0)) throw std::invalid_argument("SimConfig: dt, t_end > 0");
        if (monitor_cadence < 1) throw std::invalid_argument("SimConfig: cadence >= 1");
        if (!(amplitude >= 0.0)) throw std::invalid_argument("SimConfig: amplitude >= 0");
    }

    /// Advisory CFL bound for the explicit nonlinear part: the linear stiff
    /// multipliers are integrated exactly, so only advection-scale terms
    /// constrain dt.
    double stability_dt(double velocity_scale = 1.0) const {
        const double k_max = (n / 3.0) / box_len;  // largest retained mode
        return 1.0 / (k_max * std::max(1.0, velocity_scale));
    }
    bool dt_within_advisory(double velocity_scale = 1.0) const {
        return dt <= 0.5 * stability_dt(velocity_scale);
    }
};

struct MonitorSample {
    double t = 0.0;
    double grad_norm[3] = {0, 0, 0};  // ||grad^m (rho,u,theta,eta)||, m=0..2
    double h_value = 0.0;             // H(t)
    double l_value = 0.0;             // L(t)
    double h2_sq = 0.0;               // ||U||_{H^2}^2
    double relax_norm = 0.0;          // ||4 theta - eta||_{L2}
    double min_one_plus_rho = 0.0;
    // zero-order balance bookkeeping
    double energy_weighted = 0.0;   // E(t)
    double dissipation = 0.0;       // D(t)
    double balance_rhs = 0.0;       // R(t); dE/dt = -D + R along the flow
    double diss_thm = 0.0;          // dissipation integrand of the N functional
    double n_partial = 0.0;         // sup_{tau<=t} ||U||_{H2}^2 + int diss_thm
};

struct MonitorSeries {
    std::vector<MonitorSample> samples;
};

struct RunRecord {
    SimConfig config;
    MonitorSeries monitors;
    bool aborted = false;
    std::string abort_reason;
    double abort_time = 0.0;
    // measured constants
    double h_equiv_min = 0.0, h_equiv_max = 0.0;  // H / ||grad^2 U||^2 band
    double l_equiv_min = 0.0, l_equiv_max = 0.0;  // L / ||U||_{L2}^2 band
    double n_constant = 0.0;                      // N(t_end) / N(0)
    double late_slope = 0.0;                      // fitted d/dt log ||U||
    double linear_gap = 0.0;                      // spectral gap at |xi| = 1/L
    double final_over_initial_h2 = 0.0;
};

// ---------------------------------------------------------------------------

/// Energy functionals H(t) and L(t).
///   H = ||grad^2(rho,u,theta,eta)||^2 - c <grad div u, grad rho^h>
///   L = ||(rho,u,F)||^2 + 1/2 ||G||^2 + 1/4 <u, grad rho^l>
/// (the paper's L displays ||F|| unsquared; the square is the dimensionally
/// consistent reading and is what we compute).
inline std::pair<double, double> energy_functionals(const PerturbationState& state,
                                                    const CutoffPair& cutoffs,
                                                    double coupling_coeff = 0.05) {
    ScalarField rho = state.rho.as_spectral();
    ScalarField theta = state.theta.as_spectral();
    ScalarField eta = state.eta.as_spectral();
    VectorField u = {state.vel[0].as_spectral(), state.vel[1].as_spectral(),
                     state.vel[2].as_spectral()};
    const SpectralGrid& g = *state.grid();

    double h2 = 0.0;       // sum of ||grad^2 f||^2
    double cross_h = 0.0;  // <grad div u, grad rho^h>
    double l0 = 0.0;       // ||rho||^2 + ||u||^2 + ||F||^2 + 1/2 ||G||^2
    double cross_l = 0.0;  // <u, grad rho^l>

    g.for_each_mode([&](std::size_t idx, double kx, double ky, double kz, double k2) {
        const cplx I(0.0, 1.0);
        const cplx r = rho[idx], th = theta[idx], et = eta[idx];
        const cplx ux = u[0][idx], uy = u[1][idx], uz = u[2][idx];
        const cplx kdotu = kx * ux + ky * uy + kz * uz;

        const double usq = std::norm(ux) + std::norm(uy) + std::norm(uz);
        h2 += k2 * k2 * (std::norm(r) + usq + std::norm(th) + std::norm(et));

        const double rmag = std::sqrt(k2);
        const double p1 = cutoffs.phi1(rmag);
        // grad div u = -k (k.u); grad rho^h = i k phi1 rho
        const cplx gdru_dot = -k2 * kdotu * std::conj(I * p1 * r);
        cross_h += k2 == 0.0 ? 0.0 : gdru_dot.real();

        const cplx G = 4.0 * th - et;
        const cplx F = th + et;
        l0 += std::norm(r) + usq + std::norm(F) + 0.5 * std::norm(G);
        const double p0 = cutoffs.phi0(rmag);
        // <u, grad rho^l>: sum_j u_j conj(i k_j phi0 rho)
        const cplx c = kdotu * std::conj(I * p0 * r);
        cross_l += c.real();
    });

    const double vol = g.box_volume();
    const double H = vol * (h2 - coupling_coeff * cross_h);
    const double L = vol * (l0 + 0.25 * cross_l);
    return {H, L};
}

/// Residual of the weighted zero-order energy balance over each monitor
/// interval, per unit time:
///   [E(t1)-E(t0)]/dt + trapz(D) - trapz(R),
/// normalized by the segment's peak energy. Shrinks at second order in the
/// sampling interval.
inline std::vector<double> balance_residual(const MonitorSeries& series) {
    const auto& s = series.samples;
    if (s.size() < 2) throw std::invalid_argument("balance_residual: need >= 2 samples");
    double scale = 0.0;
    for (const auto& m : s) scale = std::max(scale, m.energy_weighted);
    if (scale == 0.0) scale = 1.0;
    std::vector<double> res;
    res.reserve(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double dt = s[i + 1].t - s[i].t;
        const double dE = (s[i + 1].energy_weighted - s[i].energy_weighted) / dt;
        const double D = 0.5 * (s[i].dissipation + s[i + 1].dissipation);
        const double R = 0.5 * (s[i].balance_rhs + s[i + 1].balance_rhs);
        res.push_back((dE + D - R) / scale);
    }
    return res;
}

// ---------------------------------------------------------------------------

/// Pseudo-spectral integrator. The full linear symbol is applied exactly per
/// mode (shear scalar decay + the 4x4 compressible propagator, which depends
/// only on |k| and is cached per integer |j|^2); the nonlinear terms are
/// explicit.
class Simulator {
  public:
    Simulator(GridPtr grid, SimConfig config)
        : grid_(std::move(grid)), config_(std::move(config)), params_() {
        config_.validate();
        max_j2_ = 3 * (grid_->n() / 2) * (grid_->n() / 2);
    }

    const SimConfig& config() const { return config_; }
    const GridPtr& grid() const { return grid_; }

    /// Exact linear update over dt: U -> e^{-dt A} U, mode by mode.
    void apply_propagator(PerturbationState& state, double dt) const {
        const PropagatorTable& tab = propagator_table(dt);
        state.to_spectral();
        const SpectralGrid& g = *grid_;
        auto& rho = state.rho;
        auto& theta = state.theta;
        auto& eta = state.eta;
        auto& u = state.vel;
        const double inv_L2 = 1.0 / (g.box_len() * g.box_len());

        g.for_each_mode([&](std::size_t idx, double kx, double ky, double kz, double k2) {
            const int j2 = int(std::lround(k2 / inv_L2));
            const cplx I(0.0, 1.0);
            if (j2 == 0) {
                Eigen::Vector4cd v(rho[idx], cplx(0, 0), theta[idx], eta[idx]);
                Eigen::Vector4cd w = tab.comp[0].cast<cplx>() * v;
                rho[idx] = w(0);
                theta[idx] = w(2);
                eta[idx] = w(3);
                return;
            }
            const double kmag = std::sqrt(k2);
            const double ikx = kx / kmag, iky = ky / kmag, ikz = kz / kmag;
            const cplx ux = u[0][idx], uy = u[1][idx], uz = u[2][idx];
            const cplx khat_dot_u = ikx * ux + iky * uy + ikz * uz;
            const cplx d = I * khat_dot_u;  // d-hat = i k.u / |k|

            Eigen::Vector4cd v(rho[idx], d, theta[idx], eta[idx]);
            Eigen::Vector4cd w = tab.comp[j2].cast<cplx>() * v;
            const double sdec = tab.shear[j2];

            rho[idx] = w(0);
            theta[idx] = w(2);
            eta[idx] = w(3);
            const cplx comp_new = -I * w(1);  // khat.u after the update
            u[0][idx] = sdec * (ux - ikx * khat_dot_u) + ikx * comp_new;
            u[1][idx] = sdec * (uy - iky * khat_dot_u) + iky * comp_new;
            u[2][idx] = sdec * (uz - ikz * khat_dot_u) + ikz * comp_new;
        });
    }

    /// One time step. Throws std::domain_error if the state leaves the
    /// admissible tube during a nonlinear evaluation.
    void step(PerturbationState& state, double dt) const {
        if (config_.integrator == Integrator::imex_euler) {
            model::NonlinearTerms n = model::nonlinear_terms(state, params_, config_.eps_pos);
            add_terms(state, n, dt);
            apply_propagator(state, dt);
        } else {
            // integrating-factor Heun: U1 = P(U + dt N(U));
            // U+ = P U + dt/2 (P N(U) + N(U1))
            model::NonlinearTerms n1 = model::nonlinear_terms(state, params_, config_.eps_pos);
            PerturbationState stage = state;
            add_terms(stage, n1, dt);
            apply_propagator(stage, dt);
            model::NonlinearTerms n2 = model::nonlinear_terms(stage, params_, config_.eps_pos);

            add_terms(state, n1, 0.5 * dt);
            apply_propagator(state, dt);
            add_terms(state, n2, 0.5 * dt);
        }
        mask_state(state);
    }

    MonitorSample monitor(const PerturbationState& state, double t) const {
        MonitorSample m;
        m.t = t;
        for (int order = 0; order < 3; ++order) {
            double sq = sobolev_seminorm(state.rho, order);
            double su = sobolev_seminorm(state.vel, order);
            double st = sobolev_seminorm(state.theta, order);
            double se = sobolev_seminorm(state.eta, order);
            m.grad_norm[order] = std::sqrt(sq * sq + su * su + st * st + se * se);
        }
        auto [H, L] = energy_functionals(state, config_.cutoffs, config_.coupling_coeff);
        m.h_value = H;
        m.l_value = L;
        const double h2n = state.h2_norm();
        m.h2_sq = h2n * h2n;
        {
            auto diag = model::diagonalize(state);
            m.relax_norm = l2_norm(diag.g_var);
        }
        m.min_one_plus_rho = state.min_one_plus_rho();

        // zero-order balance pieces, weights (4,4,4,1)
        const double nr = l2_norm(state.rho), nu = l2_norm(state.vel),
                     nt = l2_norm(state.theta), ne = l2_norm(state.eta);
        m.energy_weighted = 0.5 * (4 * nr * nr + 4 * nu * nu + 4 * nt * nt + ne * ne);

        const double gu = sobolev_seminorm(state.vel, 1);
        const double gt = sobolev_seminorm(state.theta, 1);
        const double ge = sobolev_seminorm(state.eta, 1);
        const double du = l2_norm(divergence(state.vel));
        m.dissipation = 4 * gu * gu + 4 * gt * gt + ge * ge + 8 * du * du +
                        m.relax_norm * m.relax_norm;

        // R = -4<u, grad eta> + 4<rho,N1> + 4<u,N2> + 4<theta,N3> + <eta,N4>
        double rhs = -4.0 * inner_product(state.vel, gradient(state.eta));
        try {
            model::NonlinearTerms n = model::nonlinear_terms(state, params_, config_.eps_pos);
            rhs += 4.0 * inner_product(state.rho, n.n1);
            rhs += 4.0 * inner_product(state.vel, n.n2);
            rhs += 4.0 * inner_product(state.theta, n.n3);
            rhs += inner_product(state.eta, n.n4);
        } catch (const std::domain_error&) {
            // inadmissible snapshot; balance bookkeeping is best-effort here
        }
        m.balance_rhs = rhs;

        // Theorem-style dissipation integrand for the N functional
        const double grho1 = sobolev_seminorm(state.rho, 1);
        const double grho2 = sobolev_seminorm(state.rho, 2);
        double dth = 0.0;
        for (int order = 1; order <= 3; ++order) {
            const double a = sobolev_seminorm(state.vel, order);
            const double b = sobolev_seminorm(state.theta, order);
            const double c = sobolev_seminorm(state.eta, order);
            dth += a * a + b * b + c * c;
        }
        auto diag = model::diagonalize(state);
        const double relax_h2 = sobolev_norm(diag.g_var, 2);
        m.diss_thm = grho1 * grho1 + grho2 * grho2 + dth + relax_h2 * relax_h2;
        return m;
    }

    /// Random band-limited initial data with the configured H^2 amplitude.
    PerturbationState initial_data() const {
        std::mt19937_64 rng(config_.seed);
        PerturbationState state(grid_);
        const int band = grid_->n() / 4;
        auto gen = [&](ScalarField& f) {
            f = random_band_limited(grid_, band, rng);
            f.to_spectral();
            f[0] = cplx(0.0, 0.0);  // mean-free perturbations
        };
        gen(state.rho);
        for (auto& c : state.vel) gen(c);
        gen(state.theta);
        gen(state.eta);
        const double h2 = state.h2_norm();
        if (h2 > 0.0 && config_.amplitude > 0.0) {
            state *= config_.amplitude / h2;
        } else {
            state *= 0.0;
        }
        mask_state(state);
        return state;
    }

    RunRecord run() const {
        RunRecord rec;
        rec.config = config_;
        PerturbationState state = initial_data();

        const int steps = int(std::ceil(config_.t_end / config_.dt - 1e-12));
        double t = 0.0;
        double sup_h2_sq = 0.0;
        double diss_integral = 0.0;
        MonitorSample prev = monitor(state, 0.0);
        sup_h2_sq = prev.h2_sq;
        prev.n_partial = sup_h2_sq;
        rec.monitors.samples.push_back(prev);
        const double n0 = std::max(prev.h2_sq, 1e-300);

        for (int s = 1; s <= steps; ++s) {
            const double dt = std::min(config_.dt, config_.t_end - t);
            try {
                step(state, dt);
            } catch (const std::domain_error& e) {
                rec.aborted = true;
                rec.abort_reason = e.what();
                rec.abort_time = t;
                break;
            }
            t += dt;
            if (s % config_.monitor_cadence == 0 || s == steps) {
                MonitorSample m = monitor(state, t);
                sup_h2_sq = std::max(sup_h2_sq, m.h2_sq);
                diss_integral += 0.5 * (prev.diss_thm + m.diss_thm) * (m.t - prev.t);
                m.n_partial = sup_h2_sq + diss_integral;
                if (m.min_one_plus_rho < config_.eps_pos) {
                    rec.aborted = true;
                    rec.abort_reason = "min(1+rho) fell below eps_pos";
                    rec.abort_time = t;
                    rec.monitors.samples.push_back(m);
                    break;
                }
                rec.monitors.samples.push_back(m);
                prev = m;
            }
        }

        finalize_measurements(rec);
        rec.n_constant = rec.monitors.samples.back().n_partial / n0;
        return rec;
    }

    /// Spectral gap of the linearization at the lowest nonzero wavenumber.
    double linear_gap() const {
        const double k = 1.0 / grid_->box_len();
        const double comp = linear::eigenvalues(k)[0].real();
        return std::min(comp, k * k);
    }

  private:
    struct PropagatorTable {
        std::vector<Eigen::Matrix4d> comp;  // indexed by integer |j|^2
        std::vector<double> shear;
    };

    const PropagatorTable& propagator_table(double dt) const {
        auto it = prop_cache_.find(dt);
        if (it != prop_cache_.end()) return it->second;
        PropagatorTable tab;
        tab.comp.resize(max_j2_ + 1);
        tab.shear.resize(max_j2_ + 1);
        const double L = grid_->box_len();
        for (int j2 = 0; j2 <= max_j2_; ++j2) {
            const double k2 = j2 / (L * L);
            tab.comp[j2] = linear::propagator(dt, std::sqrt(k2));
            tab.shear[j2] = std::exp(-k2 * dt);
        }
        return prop_cache_.emplace(dt, std::move(tab)).first->second;
    }

    static void add_terms(PerturbationState& state, const model::NonlinearTerms& n,
                          double scale) {
        state.to_spectral();
        auto axpy = [scale](ScalarField& dst, const ScalarField& src) {
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
        };
        axpy(state.rho, n.n1);
        for (int i = 0; i < 3; ++i) axpy(state.vel[i], n.n2[i]);
        axpy(state.theta, n.n3);
        axpy(state.eta, n.n4);
    }

    void mask_state(PerturbationState& state) const {
        state.to_spectral();
        grid_->apply_dealias_mask(state.rho.data().data());
        for (auto& c : state.vel) grid_->apply_dealias_mask(c.data().data());
        grid_->apply_dealias_mask(state.theta.data().data());
        grid_->apply_dealias_mask(state.eta.data().data());
    }

    void finalize_measurements(RunRecord& rec) const {
        auto& s = rec.monitors.samples;
        rec.linear_gap = linear_gap();
        rec.h_equiv_min = std::numeric_limits<double>::infinity();
        rec.h_equiv_max = 0.0;
        rec.l_equiv_min = std::numeric_limits<double>::infinity();
        rec.l_equiv_max = 0.0;
        for (const auto& m : s) {
            const double g2 = m.grad_norm[2] * m.grad_norm[2];
            const double l2 = m.grad_norm[0] * m.grad_norm[0];
            if (g2 > 0.0) {
                rec.h_equiv_min = std::min(rec.h_equiv_min, m.h_value / g2);
                rec.h_equiv_max = std::max(rec.h_equiv_max, m.h_value / g2);
            }
            if (l2 > 0.0) {
                rec.l_equiv_min = std::min(rec.l_equiv_min, m.l_value / l2);
                rec.l_equiv_max = std::max(rec.l_equiv_max, m.l_value / l2);
            }
        }
        if (s.empty()) return;
        rec.final_over_initial_h2 =
            s.front().h2_sq > 0.0 ? std::sqrt(s.back().h2_sq / s.front().h2_sq) : 0.0;

        // late-time exponential slope of log ||U||_{L2}
        const double t_end = s.back().t;
        const double t_lo = 0.6 * t_end;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const auto& m : s) {
            if (m.t < t_lo || m.grad_norm[0] <= 0.0) continue;
            const double x = m.t, y = std::log(m.grad_norm[0]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2) rec.late_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }

    GridPtr grid_;
    SimConfig config_;
    ModelParameters params_;
    int max_j2_ = 0;
    mutable std::map<double, PropagatorTable> prop_cache_;
};

// ---------------------------------------------------------------------------
// Binary checkpoint of the spectral state

inline void write_checkpoint(const std::string& path, const PerturbationState& state, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
    const char magic[4] = {'R', 'H', 'C', 'K'};
    const std::uint32_t version = 1;
    const std::uint32_t n = std::uint32_t(state.grid()->n());
    const double L = state.grid()->box_len();
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&L), 8);
    out.write(reinterpret_cast<const char*>(&time), 8);
    auto dump = [&](const ScalarField& f) {
        ScalarField s = f.as_spectral();
        out.write(reinterpret_cast<const char*>(s.data().data()),
                  std::streamsize(s.size() * sizeof(cplx)));
    };
    dump(state.rho);
    for (const auto& c : state.vel) dump(c);
    dump(state.theta);
    dump(state.eta);
    if (!out) throw std::runtime_error("write_checkpoint: write failed");
}

inline std::pair<PerturbationState, double> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, n = 0;
    double L = 0.0, time = 0.0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&L), 8);
    in.read(reinterpret_cast<char*>(&time), 8);
    if (!in || std::string(magic, 4) != "RHCK" || version != 1)
        throw std::runtime_error("read_checkpoint: bad header");
    GridPtr grid = make_grid(int(n), L);
    PerturbationState state(grid);
    auto load = [&](ScalarField& f) {
        in.read(reinterpret_cast<char*>(f.data().data()),
                std::streamsize(f.size() * sizeof(cplx)));
    };
    load(state.rho);
    for (auto& c : state.vel) load(c);
    load(state.theta);
    load(state.eta);
    if (!in) throw std::runtime_error("read_checkpoint: truncated file");
    return {std::move(state), time};
}

}  // namespace radhydro::sim
