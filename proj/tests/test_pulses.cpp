#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/pulses.hpp"

using namespace rydsim;
using Catch::Approx;

TEST_CASE("beam peak field and single-photon coupling", "[pulses]") {
    const BeamParams lower{1.85e-6, 10.0, 780.241};
    const double omega = dipole_rabi_rad_s(1.7258860, lower.peak_field_v_m());
    CHECK(omega / phys::two_pi == Approx(65.784534e6).epsilon(1e-6));

    const BeamParams brighter{3.3e-6, 10.0, 780.241};
    CHECK(dipole_rabi_rad_s(1.7258860, brighter.peak_field_v_m()) / phys::two_pi ==
          Approx(87.860751e6).epsilon(1e-6));

    // field scales as sqrt(P)/w
    const BeamParams wide{1.85e-6, 20.0, 780.241};
    CHECK(lower.peak_field_v_m() / wide.peak_field_v_m() == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two-photon coupling and ground light shift", "[pulses]") {
    PulseParams p;
    p.omega_lower_rad_s = phys::two_pi * 65.784534e6;
    p.omega_upper_rad_s = phys::two_pi * 56.852268e6;
    p.delta_interm_rad_s = phys::two_pi * 3.4e9;
    CHECK(p.rabi_rad_s() / phys::two_pi == Approx(0.55e6).epsilon(1e-6));

    PulseParams q;
    q.omega_lower_rad_s = phys::two_pi * 87.860751e6;
    q.omega_upper_rad_s = 0.0;
    q.delta_interm_rad_s = phys::two_pi * 3.8e9;
    CHECK(q.light_shift_ground_rad_s() / phys::two_pi == Approx(0.507863e6).epsilon(1e-6));

    PulseParams z = p;
    z.delta_interm_rad_s = 0.0;
    CHECK_THROWS_AS(z.rabi_rad_s(), std::invalid_argument);
    CHECK(p.adiabatic_ok());
}

TEST_CASE("resonant two-level flop closed form", "[pulses]") {
    const double omega = phys::two_pi * 0.5e6;
    for (double t_us : {0.1, 0.5, 1.0, 1.37, 3.0}) {
        const double t = t_us * 1e-6;
        const FlopPoint f = rabi_flop(omega, 0.0, t);
        CHECK(f.p_rydberg == Approx(std::pow(std::sin(0.5 * omega * t), 2)).margin(1e-14));
        CHECK(f.p_ground + f.p_rydberg == Approx(1.0).margin(1e-14));
    }
    // detuned: amplitude reduced to omega^2/W^2
    const double delta = phys::two_pi * 0.7e6;
    const double w = std::hypot(omega, delta);
    const FlopPoint g = rabi_flop(omega, delta, phys::pi / w);
    CHECK(g.p_rydberg == Approx(omega * omega / (w * w)).margin(1e-12));
}

TEST_CASE("step propagator agrees with the closed form", "[pulses]") {
    const double omega = phys::two_pi * 0.49e6;
    for (double delta_mhz : {0.0, 0.2, -0.6, 1.3}) {
        const double delta = phys::two_pi * delta_mhz * 1e6;
        for (double t_us : {0.2, 0.9, 2.5}) {
            const double t = t_us * 1e-6;
            std::vector<SequenceStep> seq{
                {SequenceStep::Kind::pulse, t, omega, delta}};
            const Amplitudes psi = propagate_sequence(seq);
            const FlopPoint f = rabi_flop(omega, delta, t);
            CHECK(std::norm(psi[1]) == Approx(f.p_rydberg).margin(1e-12));
            CHECK(std::norm(psi[0]) + std::norm(psi[1]) == Approx(1.0).margin(1e-13));
        }
    }
    // splitting a pulse in two changes nothing
    std::vector<SequenceStep> whole{
        {SequenceStep::Kind::pulse, 1.7e-6, omega, phys::two_pi * 0.3e6}};
    std::vector<SequenceStep> halves{
        {SequenceStep::Kind::pulse, 0.85e-6, omega, phys::two_pi * 0.3e6},
        {SequenceStep::Kind::pulse, 0.85e-6, omega, phys::two_pi * 0.3e6}};
    const Amplitudes a = propagate_sequence(whole);
    const Amplitudes b = propagate_sequence(halves);
    CHECK(std::abs(std::norm(a[1]) - std::norm(b[1])) < 1e-13);
}

TEST_CASE("separated-pulse interference has the analytic fringe", "[pulses]") {
    // resonant pi/2 - free gap at detuning delta - resonant pi/2:
    // excitation probability is cos^2(delta T / 2)
    const double omega = phys::two_pi * 1.0e6;
    const double t_half = 0.5 * phys::pi / omega;
    for (double delta_mhz : {0.05, 0.21, 0.5, -0.37}) {
        for (double gap_us : {0.5, 2.0, 5.0}) {
            const double delta = phys::two_pi * delta_mhz * 1e6;
            const double gap = gap_us * 1e-6;
            std::vector<SequenceStep> seq{
                {SequenceStep::Kind::pulse, t_half, omega, 0.0},
                {SequenceStep::Kind::gap, gap, 0.0, delta},
                {SequenceStep::Kind::pulse, t_half, omega, 0.0}};
            const Amplitudes psi = propagate_sequence(seq);
            const double expect = std::pow(std::cos(0.5 * delta * gap), 2);
            CHECK(std::norm(psi[1]) == Approx(expect).margin(1e-8));
        }
    }
}

TEST_CASE("thermal detuning spread", "[pulses]") {
    const AtomicConstants atoms = AtomicConstants::rb87();
    const DopplerModel dm = DopplerModel::copropagating(atoms, 1.0e-3);
    CHECK(dm.k_eff_rad_m / phys::two_pi * 1e-6 == Approx(0.8016777).epsilon(1e-6));
    CHECK(dm.sigma_v_m_s() == Approx(0.309303).epsilon(1e-6));
    CHECK(dm.sigma_delta_rad_s() / phys::two_pi == Approx(247.961e3).epsilon(5e-6));
    const DopplerModel cold = DopplerModel::copropagating(atoms, 0.0);
    CHECK(cold.sigma_delta_rad_s() == 0.0);
}

TEST_CASE("thermally averaged flop is deterministic and damps", "[pulses]") {
    PulseParams p;
    p.omega_lower_rad_s = phys::two_pi * 65.784534e6;
    p.omega_upper_rad_s = phys::two_pi * 50.797907e6;  // gives ~0.49 MHz effective
    p.delta_interm_rad_s = phys::two_pi * 3.4e9;
    const DopplerModel dm = DopplerModel::copropagating(AtomicConstants::rb87(), 1.0e-3);

    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i) grid.push_back(i * 0.2e-6);

    const TraceResult a = doppler_averaged_flop(p, dm, grid, 500, 42);
    const TraceResult b = doppler_averaged_flop(p, dm, grid, 500, 42);
    REQUIRE(a.value.size() == grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(a.value[i] == b.value[i]);  // bitwise deterministic
        CHECK(a.value[i] >= -1e-12);
        CHECK(a.value[i] <= 1.0 + 1e-12);
        CHECK(a.stderr_[i] >= 0.0);
    }
    CHECK(a.value.front() == Approx(1.0).margin(1e-12));

    const TraceResult c = doppler_averaged_flop(p, dm, grid, 500, 43);
    bool differs = false;
    for (size_t i = 1; i < grid.size(); ++i) differs |= (a.value[i] != c.value[i]);
    CHECK(differs);

    // late-time contrast is reduced relative to early oscillation
    double early_min = 1.0, late_min = 1.0, late_max = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 2e-6) early_min = std::min(early_min, a.value[i]);
        if (grid[i] > 12e-6) {
            late_min = std::min(late_min, a.value[i]);
            late_max = std::max(late_max, a.value[i]);
        }
    }
    CHECK(late_max - late_min < 1.0 - early_min);
}

TEST_CASE("interrupted drive with a free gap: analytic curve", "[pulses]") {
    // two resonant drive halves of total length t separated by a fixed gap
    // at detuning d give excitation sin^2(Omega t / 2) cos^2(d T / 2)
    PulseParams p;
    const double omega = phys::two_pi * 0.7e6;
    p.omega_lower_rad_s = phys::two_pi * 87.860751e6;
    p.omega_upper_rad_s = omega * 2.0 * (phys::two_pi * 3.8e9) / p.omega_lower_rad_s;
    p.delta_interm_rad_s = phys::two_pi * 3.8e9;
    REQUIRE(p.rabi_rad_s() == Approx(omega).epsilon(1e-12));
    CHECK(p.light_shift_ground_rad_s() / phys::two_pi == Approx(0.507863e6).epsilon(1e-6));

    const double gap_detuning = p.light_shift_ground_rad_s();
    const double gap_s = 2.0e-6;
    const DopplerModel cold = DopplerModel::copropagating(AtomicConstants::rb87(), 0.0);

    std::vector<double> t_on;
    for (int i = 0; i <= 55; ++i) t_on.push_back(i * 0.04e-6);
    const TraceResult curve =
        double_pulse_curve(p, gap_s, gap_detuning, t_on, cold, 1, 7);
    REQUIRE(curve.value.size() == t_on.size());
    const double fringe = std::pow(std::cos(0.5 * gap_detuning * gap_s), 2);
    for (size_t i = 0; i < t_on.size(); ++i) {
        const double expect = std::pow(std::sin(0.5 * omega * t_on[i]), 2) * fringe;
        CHECK(curve.value[i] == Approx(expect).margin(1e-10));
    }
}
