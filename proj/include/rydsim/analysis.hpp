#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rydsim/ini.hpp"

namespace rydsim {

// F(t) = (1 - a) + a exp(-t/tau) cos(omega t)
struct FitModel {
    double a = 0.0;
    double tau_s = 0.0;
    double omega_rad_s = 0.0;

    double eval(double t) const {
        return (1.0 - a) + a * std::exp(-t / tau_s) * std::cos(omega_rad_s * t);
    }
};

struct FitResult {
    FitModel model;
    double a_err = 0.0;
    double tau_err_s = 0.0;
    double omega_err_rad_s = 0.0;
    double sse = 0.0;      // weighted sum of squared residuals
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;  // no resolvable oscillation / singular normal matrix
};

namespace fitdetail {

struct Normal3 {
    // symmetric 3x3 normal matrix and gradient
    std::array<double, 6> m{};  // xx, xy, xz, yy, yz, zz
    std::array<double, 3> g{};
};

inline bool solve3(const std::array<double, 6>& m, const std::array<double, 3>& b,
                   std::array<double, 3>& x, double lambda) {
    const double a00 = m[0] * (1.0 + lambda), a01 = m[1], a02 = m[2];
    const double a11 = m[3] * (1.0 + lambda), a12 = m[4];
    const double a22 = m[5] * (1.0 + lambda);
    const double c00 = a11 * a22 - a12 * a12;
    const double c01 = a02 * a12 - a01 * a22;
    const double c02 = a01 * a12 - a02 * a11;
    const double det = a00 * c00 + a01 * c01 + a02 * c02;
    if (!(std::abs(det) > 1e-300)) return false;
    const double c11 = a00 * a22 - a02 * a02;
    const double c12 = a01 * a02 - a00 * a12;
    const double c22 = a00 * a11 - a01 * a01;
    x[0] = (c00 * b[0] + c01 * b[1] + c02 * b[2]) / det;
    x[1] = (c01 * b[0] + c11 * b[1] + c12 * b[2]) / det;
    x[2] = (c02 * b[0] + c12 * b[1] + c22 * b[2]) / det;
    return true;
}

struct Problem {
    const std::vector<double>& t;  // rescaled, span ~ 1
    const std::vector<double>& y;
    const std::vector<double>& w;  // 1/sigma

    double sse(const std::array<double, 3>& p) const {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double f =
                (1.0 - p[0]) + p[0] * std::exp(-t[i] / p[1]) * std::cos(p[2] * t[i]);
            const double r = (f - y[i]) * w[i];
            s += r * r;
        }
        return s;
    }

    Normal3 normal(const std::array<double, 3>& p) const {
        Normal3 n;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double env = std::exp(-t[i] / p[1]);
            const double co = std::cos(p[2] * t[i]);
            const double si = std::sin(p[2] * t[i]);
            const double f = (1.0 - p[0]) + p[0] * env * co;
            const double r = (f - y[i]) * w[i];
            const double ja = (-1.0 + env * co) * w[i];
            const double jt = p[0] * env * co * t[i] / (p[1] * p[1]) * w[i];
            const double jo = -p[0] * env * si * t[i] * w[i];
            n.m[0] += ja * ja;
            n.m[1] += ja * jt;
            n.m[2] += ja * jo;
            n.m[3] += jt * jt;
            n.m[4] += jt * jo;
            n.m[5] += jo * jo;
            n.g[0] += ja * r;
            n.g[1] += jt * r;
            n.g[2] += jo * r;
        }
        return n;
    }
};

inline bool in_domain(const std::array<double, 3>& p) {
    return p[0] > -0.5 && p[0] < 1.5 && p[1] > 1e-6 && p[1] < 1e6 && p[2] > 0.0 &&
           p[2] < 1e6;
}

// Levenberg-Marquardt from one starting point
inline bool minimize(const Problem& prob, std::array<double, 3>& p, double& sse, int& iters) {
    double lambda = 1e-3;
    sse = prob.sse(p);
    bool converged = false;
    for (iters = 0; iters < 200; ++iters) {
        const Normal3 n = prob.normal(p);
        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            std::array<double, 3> dp{};
            std::array<double, 3> rhs = {-n.g[0], -n.g[1], -n.g[2]};
            if (!solve3(n.m, rhs, dp, lambda)) {
                lambda *= 10.0;
                continue;
            }
            std::array<double, 3> q = {p[0] + dp[0], p[1] + dp[1], p[2] + dp[2]};
            if (!in_domain(q)) {
                lambda *= 10.0;
                continue;
            }
            const double s2 = prob.sse(q);
            if (s2 <= sse) {
                const double rel = (sse - s2) / std::max(sse, 1e-300);
                const double step = std::abs(dp[0]) + std::abs(dp[1]) + std::abs(dp[2]);
                p = q;
                sse = s2;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (rel < 1e-14 || step < 1e-13) converged = true;
                break;
            }
            lambda *= 7.0;
        }
        if (!stepped) {
            // stalled: converged if the expected further decrease is negligible
            std::array<double, 3> dp{};
            const std::array<double, 3> rhs = {-n.g[0], -n.g[1], -n.g[2]};
            if (solve3(n.m, rhs, dp, 0.0)) {
                const double pred = -(n.g[0] * dp[0] + n.g[1] * dp[1] + n.g[2] * dp[2]);
                converged = pred < 1e-10 * (1.0 + sse);
            }
            break;
        }
        if (converged) break;
    }
    return converged;
}

}  // namespace fitdetail

// Weighted least squares for the damped cosine; multi-start on the frequency
// guess, ties resolved toward the smallest frequency. sigma may be empty
// (unit weights).
inline FitResult fit_damped_cosine(const std::vector<double>& t_s, const std::vector<double>& y,
                                   const std::vector<double>& sigma = {}) {
    const std::size_t n = t_s.size();
    if (n < 8) throw std::invalid_argument("fit_damped_cosine: need at least 8 points");
    if (y.size() != n) throw std::invalid_argument("fit_damped_cosine: t/y size mismatch");
    if (!sigma.empty() && sigma.size() != n)
        throw std::invalid_argument("fit_damped_cosine: sigma size mismatch");
    const double t0 = t_s.front();
    const double span = t_s.back() - t0;
    if (!(span > 0.0)) throw std::invalid_argument("fit_damped_cosine: time span must be > 0");

    // rescale time so every parameter is O(1)
    std::vector<double> ts(n), w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) ts[i] = (t_s[i] - t0) / span;
    bool have_sigma = !sigma.empty();
    if (have_sigma) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(sigma[i] > 0.0)) { have_sigma = false; break; }
        }
        if (have_sigma)
            for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / sigma[i];
    }
    if (!have_sigma) std::fill(w.begin(), w.end(), 1.0);

    // initial guesses
    double ymin = y[0], ymax = y[0], ysum = 0.0;
    for (double v : y) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
        ysum += v;
    }
    const double ymean = ysum / n;
    int crossings = 0;
    for (std::size_t i = 1; i < n; ++i)
        if ((y[i - 1] - ymean) * (y[i] - ymean) < 0.0) ++crossings;
    double omega0 = crossings >= 1 ? 3.14159265358979323846 * crossings : 6.0;
    omega0 = std::max(omega0, 1.0);
    double a0 = std::clamp(0.5 * (ymax - ymin), 0.05, 1.0);

    // crude envelope estimate for tau
    double tau0 = 1.0;
    {
        double early = 0.0, late = 0.0;
        int ne = 0, nl = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dev = std::abs(y[i] - ymean);
            if (ts[i] < 0.3) { early += dev; ++ne; }
            if (ts[i] > 0.7) { late += dev; ++nl; }
        }
        if (ne > 0 && nl > 0 && early > 0.0 && late > 0.0) {
            const double ratio = (late / nl) / (early / ne);
            if (ratio > 1e-4 && ratio < 0.95) tau0 = std::clamp(-0.55 / std::log(ratio), 0.05, 50.0);
            else tau0 = 2.0;
        }
    }

    fitdetail::Problem prob{ts, y, w};
    std::array<double, 3> best{};
    double best_sse = std::numeric_limits<double>::infinity();
    bool best_conv = false;
    int best_iters = 0;
    for (double scale : {1.0, 0.5, 2.0}) {
        std::array<double, 3> p = {a0, tau0, omega0 * scale};
        double sse = 0.0;
        int iters = 0;
        const bool conv = fitdetail::minimize(prob, p, sse, iters);
        const bool better =
            sse < best_sse * (1.0 - 1e-12) ||
            (sse <= best_sse * (1.0 + 1e-12) && p[2] < best[2]);
        if (better) {
            best = p;
            best_sse = sse;
            best_conv = conv;
            best_iters = iters;
        }
    }

    FitResult res;
    res.model.a = best[0];
    res.model.tau_s = best[1] * span;
    res.model.omega_rad_s = best[2] / span;
    res.sse = best_sse;
    res.iterations = best_iters;
    res.converged = best_conv;

    // covariance from the final normal matrix
    const fitdetail::Normal3 nfin = prob.normal(best);
    std::array<double, 3> col{};
    double var_scale = 1.0;
    if (!have_sigma && n > 3) var_scale = best_sse / (static_cast<double>(n) - 3.0);
    std::array<std::array<double, 3>, 3> cov{};
    bool singular = false;
    for (int k = 0; k < 3; ++k) {
        std::array<double, 3> e{};
        e[k] = 1.0;
        if (!fitdetail::solve3(nfin.m, e, col, 0.0)) {
            singular = true;
            break;
        }
        for (int r = 0; r < 3; ++r) cov[r][k] = col[r];
    }
    if (!singular) {
        res.a_err = std::sqrt(std::max(0.0, cov[0][0] * var_scale));
        res.tau_err_s = std::sqrt(std::max(0.0, cov[1][1] * var_scale)) * span;
        res.omega_err_rad_s = std::sqrt(std::max(0.0, cov[2][2] * var_scale)) / span;
    }

    const double span_phase = res.model.omega_rad_s * span;
    res.degenerate = singular || !best_conv || res.model.a < 0.02 ||
                     span_phase < 3.141 || best[1] < 0.01 ||
                     !fitdetail::in_domain(best) ||
                     (res.omega_err_rad_s >= res.model.omega_rad_s &&
                      res.omega_err_rad_s > 0.0);
    return res;
}

// (max - min) / (max + min) of the signal over the first `window_periods`
// periods, after boxcar smoothing with width period/8.
inline double visibility(const std::vector<double>& t_s, const std::vector<double>& y,
                         double period_s, double window_periods = 2.0) {
    if (t_s.size() != y.size() || t_s.size() < 4)
        throw std::invalid_argument("visibility: need matching t/y with >= 4 points");
    if (!(period_s > 0.0) || !(window_periods > 0.0))
        throw std::invalid_argument("visibility: period and window must be > 0");
    const double t_end = t_s.front() + window_periods * period_s;
    if (t_s.back() + 1e-12 < t_end)
        throw std::invalid_argument("visibility: data do not cover the requested window");
    const double half_w = period_s / 16.0;
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_s.size(); ++i) {
        if (t_s[i] > t_end + 1e-12) break;
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t k = 0; k < t_s.size(); ++k) {
            if (std::abs(t_s[k] - t_s[i]) <= half_w) {
                acc += y[k];
                ++cnt;
            }
        }
        const double s = acc / cnt;
        vmax = std::max(vmax, s);
        vmin = std::min(vmin, s);
    }
    if (!(vmax + vmin > 0.0)) return 0.0;
    return (vmax - vmin) / (vmax + vmin);
}

}  // namespace rydsim
