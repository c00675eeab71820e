#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/trace.hpp"

namespace rydsim {

// Gaussian-beam dipole trap, parametrized by depth. The beam axis is z;
// gravity points along -x (transverse to the beam).
struct TrapModel {
    double depth_mk = 10.0;
    double waist_um = 2.7;
    double wavelength_nm = 1030.0;
    double mass_kg = 1.44316060e-25;

    double u0_j() const { return phys::kb_j_k * depth_mk * 1e-3; }

    double rayleigh_um() const {
        return phys::pi * waist_um * waist_um * 1e3 / wavelength_nm;
    }

    double radial_freq_hz() const {
        const double w_m = waist_um * 1e-6;
        return std::sqrt(4.0 * u0_j() / (mass_kg * w_m * w_m)) / phys::two_pi;
    }

    double axial_freq_hz() const {
        const double zr_m = rayleigh_um() * 1e-6;
        return std::sqrt(2.0 * u0_j() / (mass_kg * zr_m * zr_m)) / phys::two_pi;
    }

    // potential energy at (x, y, z) in um, in J (negative inside the trap)
    double potential_j(double x_um, double y_um, double z_um) const {
        const double zr = rayleigh_um();
        const double expand = 1.0 + (z_um / zr) * (z_um / zr);
        const double rho2 = x_um * x_um + y_um * y_um;
        const double w2 = waist_um * waist_um * expand;
        return -u0_j() / expand * std::exp(-2.0 * rho2 / w2);
    }
};

// Fluorescence readout statistics
struct DetectionModel {
    double count_rate_per_atom_s = 10000.0;
    double bg_rate_s = 1000.0;
    double probe_s = 12e-3;
    double duty = 2.5;  // total window / live probe time

    double window_s() const { return probe_s * duty; }
    double mean_counts(double atoms) const {
        return atoms * count_rate_per_atom_s * probe_s + bg_rate_s * probe_s;
    }
};

// One fluorescence readout of n atoms
inline long histogram_counts(double atom_seconds_live, const DetectionModel& det,
                             RandomStream& rng) {
    const double mean = atom_seconds_live * det.count_rate_per_atom_s + det.bg_rate_s * det.probe_s;
    return static_cast<long>(rng.poisson(mean));
}

// Nearest-mean classification of a count into an atom number
inline int classify_atom_number(long counts, const DetectionModel& det) {
    const double per_atom = det.count_rate_per_atom_s * det.probe_s;
    if (!(per_atom > 0.0)) throw std::invalid_argument("classify_atom_number: zero count rate");
    const double est = (static_cast<double>(counts) - det.bg_rate_s * det.probe_s) / per_atom;
    return std::max(0, static_cast<int>(std::lround(est)));
}

// Trap-loss processes during a measurement window
struct LossModel {
    double lifetime_s = 3.0;          // background-gas limited
    double probe_survival = 0.88;     // per readout window, light-induced
    double pair_loss_rate_s = 500.0;  // light-assisted collisions, per pair

    double single_rate_s(double window_s) const {
        double r = 1.0 / lifetime_s;
        if (probe_survival < 1.0) r += -std::log(probe_survival) / window_s;
        return r;
    }
};

namespace trapdetail {

// One readout window: stochastic losses (single ejections and pair
// collisions) thinning the n atoms while fluorescence accumulates; returns
// the photon count and leaves n at the survivor number.
inline long readout_window(int& n, const DetectionModel& det, const LossModel& loss,
                           RandomStream& rng) {
    const double t_end = det.window_s();
    const double lam1 = loss.single_rate_s(t_end);
    const double live_scale = det.probe_s / t_end;  // photons only while the probe is live
    double t = 0.0;
    double atom_seconds = 0.0;
    while (n > 0) {
        const double rate = n * lam1 + 0.5 * n * (n - 1) * loss.pair_loss_rate_s;
        const double dt = rng.exponential(rate);
        const double step = std::min(dt, t_end - t);
        atom_seconds += n * step;
        t += step;
        if (t >= t_end) break;
        const double u = rng.uniform() * rate;
        n -= (u < n * lam1) ? 1 : 2;
        if (n < 0) n = 0;
    }
    return histogram_counts(atom_seconds * live_scale, det, rng);
}

}  // namespace trapdetail

// Count distribution of a single readout over many loading realizations.
inline std::map<long, long> readout_histogram(double n_mean, const DetectionModel& det,
                                              const LossModel& loss, long trials,
                                              std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("readout_histogram: trials >= 1");
    std::map<long, long> hist;
    for (long tr = 0; tr < trials; ++tr) {
        RandomStream rng(seed, static_cast<std::uint64_t>(tr) + 1);
        int n = static_cast<int>(rng.poisson(n_mean));
        hist[trapdetail::readout_window(n, det, loss, rng)] += 1;
    }
    return hist;
}

// joint classification statistics of two consecutive readouts
struct PreselectionResult {
    long trials = 0;
    std::map<std::pair<int, int>, long> joint;  // (first, second) -> occurrences
    double p_second1_given_first1 = 0.0;
    long n_first1 = 0;
};

inline PreselectionResult preselection_experiment(double n_mean, const DetectionModel& det,
                                                  const LossModel& loss, long trials,
                                                  std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("preselection_experiment: trials >= 1");
    PreselectionResult out;
    out.trials = trials;
    for (long tr = 0; tr < trials; ++tr) {
        RandomStream rng(seed, static_cast<std::uint64_t>(tr) + 1);
        int n = static_cast<int>(rng.poisson(n_mean));
        long counts[2];
        for (int m = 0; m < 2; ++m) counts[m] = trapdetail::readout_window(n, det, loss, rng);
        const int k1 = classify_atom_number(counts[0], det);
        const int k2 = classify_atom_number(counts[1], det);
        out.joint[{k1, k2}] += 1;
        if (k1 == 1) {
            ++out.n_first1;
            if (k2 == 1) out.p_second1_given_first1 += 1.0;
        }
    }
    if (out.n_first1 > 0) out.p_second1_given_first1 /= out.n_first1;
    return out;
}

// Thermal sample in the harmonic approximation, rejected into the bound part
// of the exact Gaussian potential.
struct TrapSample {
    double x_um, y_um, z_um;
    double vx, vy, vz;  // m/s
};

inline TrapSample sample_trapped_atom(const TrapModel& trap, double temperature_k,
                                      RandomStream& rng) {
    const double sv = std::sqrt(phys::kb_j_k * temperature_k / trap.mass_kg);
    const double wr = phys::two_pi * trap.radial_freq_hz();
    const double wz = phys::two_pi * trap.axial_freq_hz();
    const double sx = sv / wr * 1e6;  // um
    const double sz = sv / wz * 1e6;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        TrapSample s;
        s.x_um = rng.normal(0.0, sx);
        s.y_um = rng.normal(0.0, sx);
        s.z_um = rng.normal(0.0, sz);
        s.vx = rng.normal(0.0, sv);
        s.vy = rng.normal(0.0, sv);
        s.vz = rng.normal(0.0, sv);
        const double kin = 0.5 * trap.mass_kg * (s.vx * s.vx + s.vy * s.vy + s.vz * s.vz);
        if (kin + trap.potential_j(s.x_um, s.y_um, s.z_um) < 0.0) return s;
    }
    throw NumericalError("sample_trapped_atom: rejection sampling failed (trap too shallow?)");
}

// Recapture probability after ballistic flights of the given durations.
inline TraceResult drop_recapture(const TrapModel& trap, double temperature_k,
                                  const std::vector<double>& t_drop_s, long trials,
                                  std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("drop_recapture: trials >= 1");
    TraceResult out;
    out.t_s = t_drop_s;
    out.value.assign(t_drop_s.size(), 0.0);
    out.stderr_.assign(t_drop_s.size(), 0.0);
    out.n_trials = trials;
    for (long tr = 0; tr < trials; ++tr) {
        RandomStream rng(seed, static_cast<std::uint64_t>(tr) + 1);
        const TrapSample s = sample_trapped_atom(trap, temperature_k, rng);
        for (std::size_t i = 0; i < t_drop_s.size(); ++i) {
            const double t = t_drop_s[i];
            const double x = s.x_um + (s.vx * t - 0.5 * phys::g_m_s2 * t * t) * 1e6;
            const double y = s.y_um + s.vy * t * 1e6;
            const double z = s.z_um + s.vz * t * 1e6;
            const double vx = s.vx - phys::g_m_s2 * t;
            const double kin =
                0.5 * trap.mass_kg * (vx * vx + s.vy * s.vy + s.vz * s.vz);
            if (kin + trap.potential_j(x, y, z) < 0.0) out.value[i] += 1.0;
        }
    }
    for (std::size_t i = 0; i < t_drop_s.size(); ++i) {
        const double p = out.value[i] / trials;
        out.value[i] = p;
        out.stderr_[i] = std::sqrt(std::max(p * (1.0 - p), 1.0 / trials) / trials);
    }
    return out;
}

struct TemperatureEstimate {
    double temperature_k = 0.0;
    double err_k = 0.0;
    bool converged = false;
};

// Least-squares match of measured recapture data against the drop-recapture
// model on a log-spaced temperature grid with parabolic refinement; the
// uncertainty comes from re-fitting parametric replicas of the data.
inline TemperatureEstimate estimate_temperature(const std::vector<double>& t_drop_s,
                                                const std::vector<double>& recapture,
                                                const std::vector<double>& sigma,
                                                const TrapModel& trap, long trials,
                                                std::uint64_t seed) {
    const std::size_t n = t_drop_s.size();
    if (n < 3) throw std::invalid_argument("estimate_temperature: need >= 3 points");
    if (recapture.size() != n || (!sigma.empty() && sigma.size() != n))
        throw std::invalid_argument("estimate_temperature: size mismatch");

    const int ngrid = 41;
    const double t_lo = 0.05e-3, t_hi = 10e-3;
    std::vector<double> temps(ngrid), sse(ngrid);
    std::vector<std::vector<double>> curves(ngrid);
    for (int i = 0; i < ngrid; ++i) {
        const double f = static_cast<double>(i) / (ngrid - 1);
        temps[i] = t_lo * std::pow(t_hi / t_lo, f);
        curves[i] = drop_recapture(trap, temps[i], t_drop_s, trials, seed).value;
    }
    auto sse_of = [&](const std::vector<double>& y, int i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = sigma.empty() ? 1.0 : 1.0 / std::max(sigma[k], 1e-6);
            const double r = (curves[i][k] - y[k]) * w;
            s += r * r;
        }
        return s;
    };
    auto best_t = [&](const std::vector<double>& y, bool& on_edge) {
        int ib = 0;
        double sb = sse_of(y, 0);
        for (int i = 1; i < ngrid; ++i) {
            const double s = sse_of(y, i);
            if (s < sb) {
                sb = s;
                ib = i;
            }
        }
        // the objective flattens toward the boundary, so treat the outermost
        // grid step as unresolved rather than trusting the exact argmin
        on_edge = (ib <= 1 || ib >= ngrid - 2);
        if (on_edge) return temps[ib];
        // parabolic refinement in log T
        const double l0 = std::log(temps[ib - 1]), l1 = std::log(temps[ib]),
                     l2 = std::log(temps[ib + 1]);
        const double s0 = sse_of(y, ib - 1), s1 = sse_of(y, ib), s2 = sse_of(y, ib + 1);
        const double denom = (s0 - 2.0 * s1 + s2);
        if (denom <= 0.0) return temps[ib];
        double lmin = l1 + 0.5 * (s0 - s2) / denom * (l1 - l0);
        lmin = std::clamp(lmin, l0, l2);
        return std::exp(lmin);
    };

    TemperatureEstimate est;
    bool edge = false;
    est.temperature_k = best_t(recapture, edge);
    if (edge) {
        est.converged = false;
        return est;
    }

    // parametric replicas for the error bar
    RandomStream rng(seed, 0x7e5u);
    const int reps = 48;
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = sigma.empty() ? 0.02 : sigma[k];
            y[k] = recapture[k] + rng.normal(0.0, s);
        }
        bool e2 = false;
        const double t = best_t(y, e2);
        acc += t;
        acc2 += t * t;
    }
    const double mean = acc / reps;
    est.err_k = std::sqrt(std::max(0.0, acc2 / reps - mean * mean));
    est.converged = true;
    return est;
}

}  // namespace rydsim
