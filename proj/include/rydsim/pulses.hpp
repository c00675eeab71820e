#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/trace.hpp"

namespace rydsim {

struct BeamParams {
    double power_w = 0.0;
    double waist_um = 0.0;       // 1/e^2 intensity radius
    double wavelength_nm = 0.0;

    // peak field of a Gaussian beam: E0 = sqrt(4 P / (pi eps0 c w^2))
    double peak_field_v_m() const {
        if (!(power_w >= 0.0) || !(waist_um > 0.0))
            throw std::invalid_argument("BeamParams: need power >= 0 and waist > 0");
        const double w_m = waist_um * 1e-6;
        return std::sqrt(4.0 * power_w / (phys::pi * phys::eps0_f_m * phys::c_m_s * w_m * w_m));
    }
};

// Two-photon drive after adiabatic elimination of the intermediate state.
// All rates in rad/s; detunings are signed (red detuning < 0).
struct PulseParams {
    double omega_lower_rad_s = 0.0;  // lower-leg single-photon Rabi frequency
    double omega_upper_rad_s = 0.0;  // upper-leg single-photon Rabi frequency
    double delta_interm_rad_s = 0.0; // detuning from the intermediate state
    double delta2_rad_s = 0.0;       // two-photon detuning from the dressed resonance

    double rabi_rad_s() const {
        if (delta_interm_rad_s == 0.0)
            throw std::invalid_argument("PulseParams: intermediate detuning must be nonzero");
        return omega_lower_rad_s * omega_upper_rad_s / (2.0 * delta_interm_rad_s);
    }

    double light_shift_ground_rad_s() const {
        if (delta_interm_rad_s == 0.0)
            throw std::invalid_argument("PulseParams: intermediate detuning must be nonzero");
        return omega_lower_rad_s * omega_lower_rad_s / (4.0 * delta_interm_rad_s);
    }

    // adiabatic elimination is trustworthy when the intermediate state stays far
    bool adiabatic_ok() const {
        const double om = std::max(std::abs(omega_lower_rad_s), std::abs(omega_upper_rad_s));
        return std::abs(delta_interm_rad_s) >= 10.0 * om;
    }
};

inline double dipole_rabi_rad_s(double dipole_ea0, double field_v_m) {
    return dipole_ea0 * phys::e_c * phys::a0_m * field_v_m / phys::hbar_j_s;
}

inline PulseParams rabi_from_beams(const BeamParams& lower, const BeamParams& upper,
                                   double d_lower_ea0, double d_upper_ea0,
                                   double delta_interm_rad_s, double delta2_rad_s = 0.0) {
    PulseParams p;
    p.omega_lower_rad_s = dipole_rabi_rad_s(d_lower_ea0, lower.peak_field_v_m());
    p.omega_upper_rad_s = dipole_rabi_rad_s(d_upper_ea0, upper.peak_field_v_m());
    p.delta_interm_rad_s = delta_interm_rad_s;
    p.delta2_rad_s = delta2_rad_s;
    return p;
}

struct FlopPoint {
    double p_ground = 1.0;
    double p_rydberg = 0.0;
};

// Resonantly driven two-level closed form at detuning delta2
inline FlopPoint rabi_flop(double rabi_rad_s, double delta2_rad_s, double t_s) {
    const double w2 = rabi_rad_s * rabi_rad_s + delta2_rad_s * delta2_rad_s;
    FlopPoint out;
    if (w2 == 0.0) return out;
    const double w = std::sqrt(w2);
    const double s = std::sin(0.5 * w * t_s);
    out.p_rydberg = (rabi_rad_s * rabi_rad_s / w2) * s * s;
    out.p_ground = 1.0 - out.p_rydberg;
    return out;
}

struct SequenceStep {
    enum class Kind { pulse, gap };
    Kind kind = Kind::pulse;
    double duration_s = 0.0;
    double rabi_rad_s = 0.0;      // 0 for gaps
    double detuning_rad_s = 0.0;  // two-photon detuning during this step
};

using Amplitudes = std::array<std::complex<double>, 2>;  // (ground, rydberg)

// exact 2x2 propagator for H = [[0, W/2], [W/2, -delta]]
inline Amplitudes propagate_step(const SequenceStep& step, const Amplitudes& psi) {
    const double om = (step.kind == SequenceStep::Kind::gap) ? 0.0 : step.rabi_rad_s;
    const double de = step.detuning_rad_s;
    const double wg = std::sqrt(om * om + de * de);
    const double t = step.duration_s;
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> u00, u01, u10, u11;
    if (wg == 0.0) {
        u00 = u11 = 1.0;
        u01 = u10 = 0.0;
    } else {
        const double c = std::cos(0.5 * wg * t);
        const double s = std::sin(0.5 * wg * t);
        const std::complex<double> phase = std::exp(i * (0.5 * de * t));
        u00 = phase * (c - i * s * (de / wg));
        u01 = phase * (-i * s * (om / wg));
        u10 = u01;
        u11 = phase * (c + i * s * (de / wg));
    }
    return {u00 * psi[0] + u01 * psi[1], u10 * psi[0] + u11 * psi[1]};
}

inline Amplitudes propagate_sequence(const std::vector<SequenceStep>& steps,
                                     Amplitudes psi = {1.0, 0.0}) {
    for (const auto& s : steps) psi = propagate_step(s, psi);
    return psi;
}

// Residual Doppler dephasing of the two-photon drive; k_eff is the Doppler-
// relevant wavevector of the beam pair.
struct DopplerModel {
    double temperature_k = 0.0;
    double mass_kg = 0.0;
    double k_eff_rad_m = 0.0;

    static DopplerModel copropagating(const AtomicConstants& atoms, double temperature_k) {
        DopplerModel d;
        d.temperature_k = temperature_k;
        d.mass_kg = atoms.mass_kg;
        d.k_eff_rad_m = phys::two_pi * std::abs(1.0 / (atoms.lambda_upper_nm * 1e-9) -
                                                1.0 / (atoms.lambda_lower_nm * 1e-9));
        return d;
    }

    double sigma_v_m_s() const {
        if (!(mass_kg > 0.0)) throw std::invalid_argument("DopplerModel: mass must be > 0");
        return std::sqrt(phys::kb_j_k * temperature_k / mass_kg);
    }

    double sigma_delta_rad_s() const { return k_eff_rad_m * sigma_v_m_s(); }
};

inline double doppler_detuning_sample(const DopplerModel& d, RandomStream& rng) {
    if (d.temperature_k <= 0.0) return 0.0;
    return rng.normal(0.0, d.sigma_delta_rad_s());
}

// Ground-state trace of a continuous drive, averaged over the thermal
// detuning distribution. Deterministic for fixed seed (samples are drawn once
// and reused across the whole grid).
inline TraceResult doppler_averaged_flop(const PulseParams& pulse, const DopplerModel& doppler,
                                         const std::vector<double>& t_grid_s, int n_samples,
                                         std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("doppler_averaged_flop: n_samples >= 1");
    const double om = pulse.rabi_rad_s();
    TraceResult tr;
    tr.t_s = t_grid_s;
    tr.value.assign(t_grid_s.size(), 0.0);
    tr.stderr_.assign(t_grid_s.size(), 0.0);
    tr.n_trials = n_samples;
    RandomStream rng(seed, 0);
    std::vector<double> sum(t_grid_s.size(), 0.0), sum2(t_grid_s.size(), 0.0);
    for (int k = 0; k < n_samples; ++k) {
        const double dd = pulse.delta2_rad_s + doppler_detuning_sample(doppler, rng);
        for (std::size_t i = 0; i < t_grid_s.size(); ++i) {
            const double pg = rabi_flop(om, dd, t_grid_s[i]).p_ground;
            sum[i] += pg;
            sum2[i] += pg * pg;
        }
    }
    for (std::size_t i = 0; i < t_grid_s.size(); ++i) {
        const double mean = sum[i] / n_samples;
        tr.value[i] = mean;
        const double var = std::max(0.0, sum2[i] / n_samples - mean * mean);
        tr.stderr_[i] = std::sqrt(var / std::max(1, n_samples - 1));
    }
    return tr;
}

// Two pulses of total on-time t split by a fixed gap; returns the final
// Rydberg population averaged over the Doppler distribution. The same thermal
// detuning offsets every step of a given realization, gap included.
inline TraceResult double_pulse_curve(const PulseParams& pulse, double gap_s,
                                      double gap_detuning_rad_s,
                                      const std::vector<double>& t_on_grid_s,
                                      const DopplerModel& doppler, int n_samples,
                                      std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("double_pulse_curve: n_samples >= 1");
    const double om = pulse.rabi_rad_s();
    TraceResult tr;
    tr.t_s = t_on_grid_s;
    tr.value.assign(t_on_grid_s.size(), 0.0);
    tr.stderr_.assign(t_on_grid_s.size(), 0.0);
    tr.n_trials = n_samples;
    RandomStream rng(seed, 0);
    std::vector<double> sum(t_on_grid_s.size(), 0.0), sum2(t_on_grid_s.size(), 0.0);
    for (int k = 0; k < n_samples; ++k) {
        const double dd = doppler_detuning_sample(doppler, rng);
        for (std::size_t i = 0; i < t_on_grid_s.size(); ++i) {
            const double half = 0.5 * t_on_grid_s[i];
            std::vector<SequenceStep> steps = {
                {SequenceStep::Kind::pulse, half, om, pulse.delta2_rad_s + dd},
                {SequenceStep::Kind::gap, gap_s, 0.0, gap_detuning_rad_s + dd},
                {SequenceStep::Kind::pulse, half, om, pulse.delta2_rad_s + dd},
            };
            const Amplitudes psi = propagate_sequence(steps);
            const double pr = std::norm(psi[1]);
            sum[i] += pr;
            sum2[i] += pr * pr;
        }
    }
    for (std::size_t i = 0; i < t_on_grid_s.size(); ++i) {
        const double mean = sum[i] / n_samples;
        tr.value[i] = mean;
        const double var = std::max(0.0, sum2[i] / n_samples - mean * mean);
        tr.stderr_[i] = std::sqrt(var / std::max(1, n_samples - 1));
    }
    return tr;
}

}  // namespace rydsim
