#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <lapacke.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "rydsim/constants.hpp"
#include "rydsim/pulses.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/trace.hpp"
#include "rydsim/vdw.hpp"

extern "C" void openblas_set_num_threads(int);

namespace rydsim {

// Thermal cloud in the trap; x is the beam / quantization axis.
struct CloudGeometry {
    double sigma_x_um = 3.9;
    double sigma_y_um = 0.43;
    double sigma_z_um = 0.43;
};

struct AtomSample {
    double x_um = 0.0, y_um = 0.0, z_um = 0.0;
    bool active = true;  // participates in the drive (initial-state fidelity)
};

inline std::vector<AtomSample> sample_atoms(const CloudGeometry& cloud, int n,
                                            RandomStream& rng, double min_pair_um = 0.05,
                                            double pump_fidelity = 1.0) {
    std::vector<AtomSample> atoms(n);
    for (int i = 0; i < n; ++i) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            atoms[i].x_um = rng.normal(0.0, cloud.sigma_x_um);
            atoms[i].y_um = rng.normal(0.0, cloud.sigma_y_um);
            atoms[i].z_um = rng.normal(0.0, cloud.sigma_z_um);
            bool ok = true;
            for (int k = 0; k < i; ++k) {
                const double dx = atoms[i].x_um - atoms[k].x_um;
                const double dy = atoms[i].y_um - atoms[k].y_um;
                const double dz = atoms[i].z_um - atoms[k].z_um;
                if (dx * dx + dy * dy + dz * dz < min_pair_um * min_pair_um) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
        }
        atoms[i].active = pump_fidelity >= 1.0 || rng.uniform() < pump_fidelity;
    }
    return atoms;
}

// Pairwise interaction matrix (rad/s): each pair draws an eigenvalue from the
// overlap-weighted eigenmode distribution at its own axis angle.
inline Eigen::MatrixXd assign_pair_interactions(const std::vector<AtomSample>& atoms,
                                                const EigenmodeSampler& sampler,
                                                double c6_ghz_um6, RandomStream& rng,
                                                bool force_zero = false) {
    const int n = static_cast<int>(atoms.size());
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = atoms[j].x_um - atoms[i].x_um;
            const double dy = atoms[j].y_um - atoms[i].y_um;
            const double dz = atoms[j].z_um - atoms[i].z_um;
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            double vij = 0.0;
            if (!force_zero) {
                const double theta = std::acos(std::clamp(std::abs(dx) / r, 0.0, 1.0));
                const double d_phi = sampler.sample(rng, theta);
                vij = phys::two_pi * pair_interaction_strength_hz(c6_ghz_um6, d_phi, r);
            } else {
                rng.uniform();  // keep the stream aligned with the interacting case
            }
            v(i, j) = v(j, i) = vij;
        }
    }
    return v;
}

struct EvolveSpec {
    double omega_rad_s = 0.0;
    std::vector<double> delta_rad_s;   // per atom
    Eigen::MatrixXd v_rad_s;           // symmetric pair shifts
    std::vector<double> t_s;
    bool keep_state_probs = false;     // store the full basis distribution (small n)
};

struct EvolveResult {
    std::vector<double> mean_ground;                 // per time, averaged over atoms
    std::vector<std::vector<double>> state_probs;    // [t][basis] if requested
    std::vector<std::vector<double>> excitation_pk;  // [t][k] excitation-count law
};

// Exact evolution of H = sum (Omega/2) sx_i - delta_i n_i + sum V_ij n_i n_j
// (rad/s) from all atoms in the ground state, via full diagonalization.
// Basis state s: bit i set means atom i excited.
inline EvolveResult evolve_ensemble(const EvolveSpec& spec) {
    const int n = static_cast<int>(spec.delta_rad_s.size());
    if (n < 0 || n > 12) throw std::invalid_argument("evolve_ensemble: need 0 <= n <= 12");
    if (spec.v_rad_s.rows() != n || spec.v_rad_s.cols() != n)
        throw std::invalid_argument("evolve_ensemble: interaction matrix size mismatch");
    EvolveResult out;
    const std::size_t nt = spec.t_s.size();
    out.mean_ground.assign(nt, 1.0);
    out.excitation_pk.assign(nt, std::vector<double>(n + 1, 0.0));
    if (spec.keep_state_probs) out.state_probs.assign(nt, {});
    if (n == 0) {
        for (std::size_t it = 0; it < nt; ++it) {
            out.excitation_pk[it][0] = 1.0;
            if (spec.keep_state_probs) out.state_probs[it] = {1.0};
        }
        return out;
    }

    const int dim = 1 << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double half = 0.5 * spec.omega_rad_s;
    for (int s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(s >> i & 1)) continue;
            diag -= spec.delta_rad_s[i];
            for (int j = i + 1; j < n; ++j)
                if (s >> j & 1) diag += spec.v_rad_s(i, j);
        }
        h(s, s) = diag;
        for (int i = 0; i < n; ++i) h(s, s ^ (1 << i)) = half;
    }

    Eigen::VectorXd evals(dim);
    Eigen::MatrixXd evecs;
    if (dim < 512) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success)
            throw NumericalError("evolve_ensemble: diagonalization failed");
        evals = es.eigenvalues();
        evecs = es.eigenvectors();
    } else {
        openblas_set_num_threads(1);
        evecs = h;
        const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', dim,
                                               evecs.data(), dim, evals.data());
        if (info != 0) throw NumericalError("evolve_ensemble: dsyevd failed");
    }

    // c = V^T e0: overlap of each eigenvector with the all-ground state
    const Eigen::VectorXd c = evecs.row(0).transpose();
    Eigen::VectorXd ccos(dim), csin(dim), re(dim), im(dim);
    for (std::size_t it = 0; it < nt; ++it) {
        const double t = spec.t_s[it];
        for (int k = 0; k < dim; ++k) {
            const double ph = evals(k) * t;
            ccos(k) = c(k) * std::cos(ph);
            csin(k) = -c(k) * std::sin(ph);
        }
        re.noalias() = evecs * ccos;
        im.noalias() = evecs * csin;
        double ground_acc = 0.0;
        auto& pk = out.excitation_pk[it];
        if (spec.keep_state_probs) out.state_probs[it].assign(dim, 0.0);
        for (int s = 0; s < dim; ++s) {
            const double p = re(s) * re(s) + im(s) * im(s);
            const int exc = __builtin_popcount(static_cast<unsigned>(s));
            pk[exc] += p;
            ground_acc += p * (n - exc);
            if (spec.keep_state_probs) out.state_probs[it][s] = p;
        }
        out.mean_ground[it] = ground_acc / n;
    }
    return out;
}

struct EnsembleConfig {
    double n_mean = 1.7;
    int n_cap = 10;
    CloudGeometry cloud;
    double rabi_rad_s = 0.0;
    double delta2_rad_s = 0.0;
    DopplerModel doppler;
    double c6_ghz_um6 = 450.0;
    double pump_fidelity = 1.0;
    double min_pair_um = 0.05;
    bool force_zero_interaction = false;
    long trials = 2000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: library default
};

namespace ensdetail {

// One Monte Carlo realization: draws a trial's atom number, positions,
// detunings and pair strengths from its own substream, evolves, and returns
// the ground fraction over the grid. Returns false when no atom loaded.
inline bool run_trial(const EnsembleConfig& cfg, const EigenmodeSampler& sampler,
                      const std::vector<double>& t_s, long trial, double* row,
                      bool& was_truncated) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(trial) + 1);
    long n_raw = static_cast<long>(rng.poisson(cfg.n_mean));
    was_truncated = n_raw > cfg.n_cap;
    if (was_truncated) n_raw = cfg.n_cap;
    const int n = static_cast<int>(n_raw);
    if (n == 0) return false;
    const auto atoms = sample_atoms(cfg.cloud, n, rng, cfg.min_pair_um, cfg.pump_fidelity);
    const double sig_d =
        cfg.doppler.temperature_k > 0.0 ? cfg.doppler.sigma_delta_rad_s() : 0.0;
    std::vector<double> all_deltas(n);
    for (int i = 0; i < n; ++i)
        all_deltas[i] = cfg.delta2_rad_s + (sig_d > 0.0 ? rng.normal(0.0, sig_d) : 0.0);
    const Eigen::MatrixXd v_all =
        assign_pair_interactions(atoms, sampler, cfg.c6_ghz_um6, rng,
                                 cfg.force_zero_interaction);

    std::vector<int> active;
    for (int i = 0; i < n; ++i)
        if (atoms[i].active) active.push_back(i);
    const int na = static_cast<int>(active.size());

    EvolveSpec spec;
    spec.omega_rad_s = cfg.rabi_rad_s;
    spec.t_s = t_s;
    spec.delta_rad_s.resize(na);
    spec.v_rad_s = Eigen::MatrixXd::Zero(na, na);
    for (int a = 0; a < na; ++a) {
        spec.delta_rad_s[a] = all_deltas[active[a]];
        for (int b = a + 1; b < na; ++b)
            spec.v_rad_s(a, b) = spec.v_rad_s(b, a) = v_all(active[a], active[b]);
    }
    const EvolveResult ev = evolve_ensemble(spec);
    for (std::size_t it = 0; it < t_s.size(); ++it) {
        const double ground_atoms = (na > 0 ? ev.mean_ground[it] * na : 0.0) + (n - na);
        row[it] = ground_atoms / n;
    }
    return true;
}

struct TrialRows {
    std::vector<double> rows;  // trials x nt, row-major
    std::vector<char> used;
    long n_used = 0;
    long truncated = 0;
};

inline TrialRows run_trials(const EnsembleConfig& cfg, const EigenmodeSampler& sampler,
                            const std::vector<double>& t_s) {
    if (cfg.trials < 1) throw std::invalid_argument("ensemble: trials must be >= 1");
    if (cfg.n_cap < 1 || cfg.n_cap > 12)
        throw std::invalid_argument("ensemble: need 1 <= n_cap <= 12");
    if (sampler.empty() && !cfg.force_zero_interaction)
        throw std::invalid_argument("ensemble: eigenmode sampler is empty");
    const std::size_t nt = t_s.size();
    TrialRows out;
    out.rows.assign(static_cast<std::size_t>(cfg.trials) * nt, 0.0);
    out.used.assign(cfg.trials, 0);
    int nthreads = cfg.threads;
#ifdef _OPENMP
    if (nthreads <= 0) nthreads = omp_get_max_threads();
#else
    nthreads = 1;
#endif
    long truncated = 0;
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads) \
    reduction(+ : truncated)
    for (long tr = 0; tr < cfg.trials; ++tr) {
        bool was_truncated = false;
        const bool ok = run_trial(cfg, sampler, t_s, tr,
                                  &out.rows[static_cast<std::size_t>(tr) * nt],
                                  was_truncated);
        out.used[tr] = ok ? 1 : 0;
        if (was_truncated) ++truncated;
    }
    out.truncated = truncated;
    for (long tr = 0; tr < cfg.trials; ++tr)
        if (out.used[tr]) ++out.n_used;
    return out;
}

}  // namespace ensdetail

// Ground-state retention versus pulse duration, conditioned on loading at
// least one atom and normalized to its t = 0 value. Spectator atoms (pump
// misses) stay in the ground state and dilute the contrast. Per-trial
// substreams and an ordered reduction make the result independent of the
// thread count.
inline TraceResult retention_signal(const EnsembleConfig& cfg, const EigenmodeSampler& sampler,
                                    const std::vector<double>& t_s) {
    const ensdetail::TrialRows rows = ensdetail::run_trials(cfg, sampler, t_s);
    if (rows.n_used == 0) throw NumericalError("retention_signal: no trial loaded any atom");
    const std::size_t nt = t_s.size();
    TraceResult out;
    out.t_s = t_s;
    out.value.assign(nt, 0.0);
    out.stderr_.assign(nt, 0.0);
    out.n_trials = rows.n_used;
    out.truncated_fraction = static_cast<double>(rows.truncated) / cfg.trials;
    std::vector<double> sum(nt, 0.0), sum2(nt, 0.0);
    for (long tr = 0; tr < cfg.trials; ++tr) {
        if (!rows.used[tr]) continue;
        for (std::size_t it = 0; it < nt; ++it) {
            const double v = rows.rows[static_cast<std::size_t>(tr) * nt + it];
            sum[it] += v;
            sum2[it] += v * v;
        }
    }
    for (std::size_t it = 0; it < nt; ++it) {
        const double mean = sum[it] / rows.n_used;
        out.value[it] = mean;
        const double var = std::max(0.0, sum2[it] / rows.n_used - mean * mean);
        out.stderr_[it] = std::sqrt(var / std::max<long>(1, rows.n_used - 1));
    }
    if (!out.value.empty() && out.t_s.front() == 0.0 && out.value.front() > 0.0) {
        const double norm = out.value.front();
        for (std::size_t it = 0; it < nt; ++it) {
            out.value[it] /= norm;
            out.stderr_[it] /= norm;
        }
    }
    return out;
}

// Retained per-trial traces, for bootstrap statistics on derived quantities.
struct TrialTraces {
    std::vector<double> t_s;
    std::vector<std::vector<double>> rows;
    double truncated_fraction = 0.0;
};

inline TrialTraces retention_trials(const EnsembleConfig& cfg, const EigenmodeSampler& sampler,
                                    const std::vector<double>& t_s) {
    const ensdetail::TrialRows rows = ensdetail::run_trials(cfg, sampler, t_s);
    const std::size_t nt = t_s.size();
    TrialTraces out;
    out.t_s = t_s;
    out.truncated_fraction = static_cast<double>(rows.truncated) / cfg.trials;
    out.rows.reserve(rows.n_used);
    for (long tr = 0; tr < cfg.trials; ++tr) {
        if (!rows.used[tr]) continue;
        const double* r = &rows.rows[static_cast<std::size_t>(tr) * nt];
        out.rows.emplace_back(r, r + nt);
    }
    return out;
}

}  // namespace rydsim
