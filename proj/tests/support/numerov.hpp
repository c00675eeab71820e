#pragma once

// Independent radial integrator used only by the tests to cross-check the
// semiclassical matrix elements: inward Numerov integration of the Coulomb
// radial equation in atomic units, with effective principal quantum number
// nu setting the energy E = -1/(2 nu^2).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace testsupport {

struct RadialGrid {
    double r_in = 0.05;
    double r_max = 0.0;
    double h = 0.01;
};

inline std::vector<double> numerov_u(double nu, int l, const RadialGrid& g) {
    const std::size_t n = static_cast<std::size_t>((g.r_max - g.r_in) / g.h) + 1;
    if (n < 16) throw std::invalid_argument("numerov grid too small");
    std::vector<double> u(n, 0.0), w(n, 0.0);
    const double ll = static_cast<double>(l) * (l + 1);
    const double e2 = 1.0 / (nu * nu);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = g.r_in + k * g.h;
        const double f = ll / (r * r) - 2.0 / r + e2;
        w[k] = 1.0 - g.h * g.h * f / 12.0;
    }
    u[n - 1] = 1e-20;
    u[n - 2] = 1.001e-20;
    for (std::size_t k = n - 2; k >= 1; --k) {
        u[k - 1] = ((12.0 - 10.0 * w[k]) * u[k] - w[k + 1] * u[k + 1]) / w[k - 1];
        if (std::abs(u[k - 1]) > 1e50) {
            for (std::size_t m = k - 1; m < n; ++m) u[m] *= 1e-50;
        }
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double wt = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        norm += wt * u[k] * u[k] * g.h;
    }
    const double s = 1.0 / std::sqrt(norm);
    for (double& x : u) x *= s;
    return u;
}

// <nu2 l2 | r | nu1 l1> in units of a0. The inner cutoff keeps the
// integration outside the classically forbidden core, where the irregular
// solution would otherwise contaminate the normalization.
inline double numerov_matrix_element(double nu1, int l1, double nu2, int l2,
                                     double h = 0.01, double r_in = -1.0) {
    RadialGrid g;
    const int lmax = l1 > l2 ? l1 : l2;
    // default inner cutoff suits Rydberg states; low-n states need it smaller
    g.r_in = r_in > 0.0 ? r_in : std::max(0.05, lmax * (lmax + 1) / 6.0);
    const double numax = nu1 > nu2 ? nu1 : nu2;
    g.r_max = 2.0 * numax * (numax + 15.0);
    g.h = h;
    const std::vector<double> u1 = numerov_u(nu1, l1, g);
    const std::vector<double> u2 = numerov_u(nu2, l2, g);
    double acc = 0.0;
    for (std::size_t k = 0; k < u1.size(); ++k) {
        const double r = g.r_in + k * g.h;
        const double wt = (k == 0 || k == u1.size() - 1) ? 0.5 : 1.0;
        acc += wt * u1[k] * u2[k] * r * g.h;
    }
    return acc;
}

}  // namespace testsupport
