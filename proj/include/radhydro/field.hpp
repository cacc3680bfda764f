#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "radhydro/grid.hpp"

namespace radhydro {

/// Scalar field on a SpectralGrid. Data lives in one complex cube; a flag
/// records whether the cube currently holds collocation values or Fourier
/// coefficients. Conversions are explicit and in-place.
class ScalarField {
  public:
    enum class Rep { physical, spectral };

    ScalarField() = default;
    explicit ScalarField(GridPtr grid, Rep rep = Rep::spectral)
        : grid_(std::move(grid)), rep_(rep), data_(grid_->size(), cplx(0.0, 0.0)) {}

    const GridPtr& grid() const { return grid_; }
    Rep rep() const { return rep_; }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }
    std::size_t size() const { return data_.size(); }

    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    void to_spectral() {
        if (rep_ == Rep::physical) {
            grid_->forward(data_);
            rep_ = Rep::spectral;
        }
    }
    void to_physical() {
        if (rep_ == Rep::spectral) {
            grid_->backward(data_);
            rep_ = Rep::physical;
        }
    }

    ScalarField as_spectral() const {
        ScalarField f = *this;
        f.to_spectral();
        return f;
    }
    ScalarField as_physical() const {
        ScalarField f = *this;
        f.to_physical();
        return f;
    }

    void set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

    ScalarField& operator+=(const ScalarField& o) {
        assert(rep_ == o.rep_);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        assert(rep_ == o.rep_);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    /// Largest |Im| over collocation points; a realness diagnostic.
    double max_imag() const {
        ScalarField p = as_physical();
        double m = 0.0;
        for (const auto& v : p.data_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    double min_real() const {
        ScalarField p = as_physical();
        double m = p.data_.empty() ? 0.0 : p.data_[0].real();
        for (const auto& v : p.data_) m = std::min(m, v.real());
        return m;
    }

    cplx mean_mode() const {
        ScalarField s = as_spectral();
        return s.data_[0];
    }

    /// Fill physical values from fn(x, y, z); leaves the field in physical rep.
    template <typename Fn>
    void fill_physical(Fn&& fn) {
        const int n = grid_->n();
        const double h = 2.0 * M_PI * grid_->box_len() / n;
        rep_ = Rep::physical;
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k, ++idx)
                    data_[idx] = cplx(fn(i * h, j * h, k * h), 0.0);
    }

  private:
    GridPtr grid_;
    Rep rep_ = Rep::spectral;
    std::vector<cplx> data_;
};

using VectorField = std::array<ScalarField, 3>;

inline VectorField make_vector_field(const GridPtr& grid,
                                     ScalarField::Rep rep = ScalarField::Rep::spectral) {
    return {ScalarField(grid, rep), ScalarField(grid, rep), ScalarField(grid, rep)};
}

// ---------------------------------------------------------------------------
// Spectral calculus

/// d/dx_axis. Nyquist modes are zeroed (the asymmetric -n/2 mode has no
/// well-defined derivative sign).
inline ScalarField derivative(const ScalarField& f, int axis) {
    ScalarField s = f.as_spectral();
    const SpectralGrid& g = *s.grid();
    const int n = g.n();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k, ++idx) {
                const int fi = axis == 0 ? i : axis == 1 ? j : k;
                if (g.is_nyquist(fi)) {
                    s[idx] = cplx(0.0, 0.0);
                } else {
                    s[idx] *= cplx(0.0, g.wavenumber(fi));
                }
            }
    return s;
}

inline ScalarField laplacian(const ScalarField& f) {
    ScalarField s = f.as_spectral();
    s.grid()->for_each_mode([&](std::size_t idx, double, double, double, double k2) {
        s[idx] *= -k2;
    });
    return s;
}

inline ScalarField divergence(const VectorField& u) {
    ScalarField d = derivative(u[0], 0);
    d += derivative(u[1], 1);
    d += derivative(u[2], 2);
    return d;
}

inline VectorField gradient(const ScalarField& f) {
    return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

/// L2 inner product <f, g> = integral over the box of f*conj(g).
inline double inner_product(const ScalarField& f, const ScalarField& g) {
    ScalarField fs = f.as_spectral();
    ScalarField gs = g.as_spectral();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double term = (fs[i] * std::conj(gs[i])).real();
        // Kahan summation keeps the reduction order-independent of blocking.
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * f.grid()->box_volume();
}

inline double inner_product(const VectorField& u, const VectorField& v) {
    return inner_product(u[0], v[0]) + inner_product(u[1], v[1]) + inner_product(u[2], v[2]);
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner_product(f, f))); }

inline double l2_norm(const VectorField& u) {
    return std::sqrt(std::max(0.0, inner_product(u, u)));
}

// ---------------------------------------------------------------------------
// Random band-limited data

/// Real random field with spectral support in |j_axis| <= max_mode, unit-free
/// amplitude; deterministic in the rng state.
inline ScalarField random_band_limited(const GridPtr& grid, int max_mode, std::mt19937_64& rng) {
    ScalarField f(grid, ScalarField::Rep::physical);
    std::normal_distribution<double> dist(0.0, 1.0);
    // Build from a random physical field projected onto the band: fill with
    // white noise, transform, truncate. Realness is exact by construction.
    for (auto& v : f.data()) v = cplx(dist(rng), 0.0);
    f.to_spectral();
    const SpectralGrid& g = *grid;
    const int n = g.n();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k, ++idx) {
                const bool keep = std::abs(g.freq(i)) <= max_mode &&
                                  std::abs(g.freq(j)) <= max_mode &&
                                  std::abs(g.freq(k)) <= max_mode && !g.is_nyquist(i) &&
                                  !g.is_nyquist(j) && !g.is_nyquist(k);
                if (!keep) f[idx] = cplx(0.0, 0.0);
            }
    return f;
}

}  // namespace radhydro
