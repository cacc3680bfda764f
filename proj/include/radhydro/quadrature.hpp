#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace radhydro {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

/// Composite Gauss-Legendre rule on [0, r_max], log-refined toward 0 so
/// heat-kernel bumps of width ~ t^{-1/2} stay resolved out to t ~ 1e4.
struct RadialQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    double r_max = 40.0;

    RadialQuadrature() : RadialQuadrature(default_panels(), 32) {}

    RadialQuadrature(const std::vector<double>& panel_edges, int nodes_per_panel) {
        if (panel_edges.size() < 2) throw std::invalid_argument("RadialQuadrature: need panels");
        r_max = panel_edges.back();
        std::vector<double> gx, gw;
        gauss_legendre(nodes_per_panel, gx, gw);
        for (std::size_t p = 0; p + 1 < panel_edges.size(); ++p) {
            const double a = panel_edges[p], b = panel_edges[p + 1];
            if (!(b > a)) throw std::invalid_argument("RadialQuadrature: panels must increase");
            for (int i = 0; i < nodes_per_panel; ++i) {
                nodes.push_back(0.5 * (b - a) * gx[i] + 0.5 * (a + b));
                weights.push_back(0.5 * (b - a) * gw[i]);
            }
        }
    }

    static std::vector<double> default_panels() {
        return {0.0, 1e-3, 4e-3, 1.6e-2, 6.4e-2, 0.25, 1.0, 4.0, 40.0};
    }

    template <typename Fn>
    double integrate(Fn&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }

    /// Relative error of the calibration integral int_0^inf r^2 e^{-r^2} dr
    /// = sqrt(pi)/4; must be below 1e-10 for a usable rule.
    double calibration_error() const {
        const double exact = std::sqrt(M_PI) / 4.0;
        const double got = integrate([](double r) { return r * r * std::exp(-r * r); });
        return std::abs(got - exact) / exact;
    }
};

}  // namespace radhydro
