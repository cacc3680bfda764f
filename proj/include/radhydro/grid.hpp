#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace radhydro {

using cplx = std::complex<double>;

/// Collocation/spectral grid for the periodic box [0, 2*pi*L)^3.
///
/// Wavenumbers along each axis are j/L for integer j in [-n/2, n/2).
/// The forward transform carries a 1/n^3 factor so that
///   f(x) = sum_k fhat(k) exp(i k.x),
/// and the discrete Parseval identity
///   cell_volume * mean(|f|^2) = box_volume * sum |fhat|^2
/// holds exactly (up to round-off).
///
/// The grid owns a pair of FFTW plans created once; transforms run on
/// caller-provided buffers via the new-array execute interface, so a single
/// grid can serve many fields (and many threads) concurrently.
class SpectralGrid {
  public:
    SpectralGrid(int n, double box_len) : n_(n), box_len_(box_len) {
        if (n < 4 || (n & (n - 1)) != 0)
            throw std::invalid_argument("SpectralGrid: n must be a power of two >= 4");
        if (!(box_len > 0.0))
            throw std::invalid_argument("SpectralGrid: box_len must be positive");
        size_ = static_cast<std::size_t>(n) * n * n;

        freq_.resize(n);
        for (int i = 0; i < n; ++i) freq_[i] = (i <= n / 2 - 1) ? i : i - n;

        // 2/3-rule mask: retain |j| < n/3 on every axis, drop the rest.
        const int keep = n / 3;
        dealias_keep_.resize(n);
        for (int i = 0; i < n; ++i) dealias_keep_[i] = std::abs(freq_[i]) <= keep;

        scratch_.resize(size_);
        auto* p = reinterpret_cast<fftw_complex*>(scratch_.data());
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            plan_fwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
            plan_bwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("SpectralGrid: FFTW planning failed");
    }

    ~SpectralGrid() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_fwd_);
        fftw_destroy_plan(plan_bwd_);
    }

    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int n() const { return n_; }
    double box_len() const { return box_len_; }
    std::size_t size() const { return size_; }
    double box_volume() const {
        const double side = 2.0 * M_PI * box_len_;
        return side * side * side;
    }
    double cell_volume() const { return box_volume() / static_cast<double>(size_); }

    /// Integer frequency index on one axis for storage index i.
    int freq(int i) const { return freq_[i]; }
    /// Physical wavenumber component.
    double wavenumber(int i) const { return freq_[i] / box_len_; }
    bool is_nyquist(int i) const { return freq_[i] == -n_ / 2; }
    bool dealias_keep(int i) const { return dealias_keep_[i]; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }

    /// Visit every mode: fn(flat_index, kx, ky, kz, k2).
    template <typename Fn>
    void for_each_mode(Fn&& fn) const {
        std::size_t idx = 0;
        for (int i = 0; i < n_; ++i) {
            const double kx = wavenumber(i);
            for (int j = 0; j < n_; ++j) {
                const double ky = wavenumber(j);
                for (int k = 0; k < n_; ++k, ++idx) {
                    const double kz = wavenumber(k);
                    fn(idx, kx, ky, kz, kx * kx + ky * ky + kz * kz);
                }
            }
        }
    }

    /// In-place physical -> spectral (includes the 1/n^3 normalization).
    void forward(cplx* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(plan_fwd_, p, p);
        const double inv = 1.0 / static_cast<double>(size_);
        for (std::size_t i = 0; i < size_; ++i) data[i] *= inv;
    }

    /// In-place spectral -> physical.
    void backward(cplx* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(plan_bwd_, p, p);
    }

    void forward(std::vector<cplx>& v) const { forward(v.data()); }
    void backward(std::vector<cplx>& v) const { backward(v.data()); }

    /// Zero every mode outside the 2/3 dealiasing ball (cube, per axis).
    void apply_dealias_mask(cplx* data) const {
        std::size_t idx = 0;
        for (int i = 0; i < n_; ++i) {
            const bool ki = dealias_keep_[i];
            for (int j = 0; j < n_; ++j) {
                const bool kj = ki && dealias_keep_[j];
                for (int k = 0; k < n_; ++k, ++idx) {
                    if (!(kj && dealias_keep_[k])) data[idx] = cplx(0.0, 0.0);
                }
            }
        }
    }

  private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    int n_;
    double box_len_;
    std::size_t size_ = 0;
    std::vector<int> freq_;
    std::vector<char> dealias_keep_;
    std::vector<cplx> scratch_;  // keeps plan buffers alive and aligned
    fftw_plan plan_fwd_ = nullptr;
    fftw_plan plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline GridPtr make_grid(int n, double box_len) {
    return std::make_shared<SpectralGrid>(n, box_len);
}

}  // namespace radhydro
