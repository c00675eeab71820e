#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rydsim/angular.hpp"
#include "rydsim/constants.hpp"

namespace rydsim {

struct RydbergLevel {
    int n = 0;
    int l = 0;
    HalfInt j;

    RydbergLevel() = default;
    RydbergLevel(int n_, int l_, HalfInt j_) : n(n_), l(l_), j(j_) {
        if (n < 1) throw std::invalid_argument("RydbergLevel: n must be >= 1");
        if (l < 0 || l >= n) throw std::invalid_argument("RydbergLevel: need 0 <= l < n");
        if (std::abs(j.tw - 2 * l) != 1)
            throw std::invalid_argument("RydbergLevel: j must be l +- 1/2");
    }

    std::string label() const {
        static const char* lchar = "spdfghiklmn";
        std::ostringstream s;
        s << n << (l < 11 ? lchar[l] : '?') << j.tw << "/2";
        return s.str();
    }
};

// Energies from the Rydberg-Ritz expansion; series data live in AtomicConstants.
class QuantumDefectModel {
  public:
    explicit QuantumDefectModel(AtomicConstants atoms) : atoms_(std::move(atoms)) {}

    static QuantumDefectModel hydrogenic() {
        AtomicConstants a;
        a.name = "hydrogenic";
        a.rydberg_hz = 3.2898419602500e15;
        return QuantumDefectModel(std::move(a));
    }

    const AtomicConstants& atoms() const { return atoms_; }

    double defect(int n, int l, HalfInt j) const {
        if (atoms_.name == "hydrogenic" || !atoms_.has_series(l, j.tw)) {
            if (atoms_.name == "hydrogenic" || l >= 4) return 0.0;  // high-l: negligible
            atoms_.series(l, j.tw);                                 // throws with context
        }
        const DefectSeries& s = atoms_.series(l, j.tw);
        const double dn = n - s.d0;
        return s.d0 + s.d2 / (dn * dn);
    }

    double nstar(const RydbergLevel& lv) const { return lv.n - defect(lv.n, lv.l, lv.j); }

  private:
    AtomicConstants atoms_;
};

inline double level_energy_hz(const QuantumDefectModel& model, const RydbergLevel& lv) {
    const double ns = model.nstar(lv);
    return -model.atoms().rydberg_hz / (ns * ns);
}

// Two-atom transfer channel a+b -> a'+b'
struct ForsterChannel {
    RydbergLevel a_in, b_in, a_out, b_out;
};

namespace leveldetail {
inline void require_dipole_step(const RydbergLevel& from, const RydbergLevel& to,
                                const char* who) {
    if (std::abs(to.l - from.l) != 1)
        throw std::invalid_argument(std::string(who) + ": " + from.label() + " -> " +
                                    to.label() + " is not a dipole step (|dl| must be 1)");
    if (std::abs(to.j.tw - from.j.tw) > 2)
        throw std::invalid_argument(std::string(who) + ": " + from.label() + " -> " +
                                    to.label() + " violates |dj| <= 1");
}
}  // namespace leveldetail

// Energy defect of the channel, (E_out - E_in)/h in Hz
inline double forster_defect_hz(const QuantumDefectModel& model, const ForsterChannel& ch) {
    leveldetail::require_dipole_step(ch.a_in, ch.a_out, "forster_defect");
    leveldetail::require_dipole_step(ch.b_in, ch.b_out, "forster_defect");
    return level_energy_hz(model, ch.a_out) + level_energy_hz(model, ch.b_out) -
           level_energy_hz(model, ch.a_in) - level_energy_hz(model, ch.b_in);
}

inline double lande_gj(int l, HalfInt j) {
    const double jj = j.value();
    const double jjp = jj * (jj + 1.0);
    const double ll = static_cast<double>(l) * (l + 1.0);
    const double ss = 0.75;
    return 1.0 + (jjp + ss - ll) / (2.0 * jjp);
}

// Ground hyperfine state vs Rydberg fine-structure state in a magnetic field
struct ZeemanStatePair {
    double g_f = 0.5;     // ground-state hyperfine g-factor
    HalfInt m_f;          // ground m_F
    int l_r = 2;          // Rydberg orbital momentum
    HalfInt j_r;          // Rydberg j
    HalfInt m_j;          // Rydberg m_j
};

// First-order shift of the two-photon resonance, Hz
inline double zeeman_resonance_shift_hz(const ZeemanStatePair& p, double b_t) {
    const double gj = lande_gj(p.l_r, p.j_r);
    return phys::mu_b_hz_t * b_t * (gj * p.m_j.value() - p.g_f * p.m_f.value());
}

// characteristic dipole scale n*^2 (e a0) of a level
inline double dipole_scale_estimate_ea0(const QuantumDefectModel& model,
                                        const RydbergLevel& lv) {
    const double ns = model.nstar(lv);
    return ns * ns;
}

namespace leveldetail {

// Anger function J_nu(z) = (1/pi) Int_0^pi cos(nu t - z sin t) dt, Simpson rule
inline double anger_j(double nu, double z) {
    const int n = 2048;  // even
    const double h = phys::pi / n;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = k * h;
        const double f = std::cos(nu * t - z * std::sin(t));
        const double w = (k == 0 || k == n) ? 1.0 : ((k & 1) ? 4.0 : 2.0);
        sum += w * f;
    }
    return sum * h / (3.0 * phys::pi);
}

}  // namespace leveldetail

// Semiclassical radial matrix element <b| r |a> in units of a0, valid for
// Rydberg-Rydberg and moderately deep transitions; accuracy ~1e-3 relative
// against direct wavefunction integration for the states used here.
inline double radial_matrix_element_a0(const QuantumDefectModel& model,
                                       const RydbergLevel& a, const RydbergLevel& b) {
    leveldetail::require_dipole_step(a, b, "radial_matrix_element");
    const double nu = model.nstar(a);
    const double nu1 = model.nstar(b);
    const int dl = b.l - a.l;
    const double lc = 0.5 * (a.l + b.l + 1);
    const double nuc = std::sqrt(nu * nu1);
    const double dnu = nu - nu1;
    const double gamma = dl * lc / nuc;

    double g0 = 1.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
    if (dnu != 0.0) {
        const double jm = leveldetail::anger_j(dnu - 1.0, -dnu);
        const double jp = leveldetail::anger_j(dnu + 1.0, -dnu);
        g0 = (jm - jp) / (3.0 * dnu);
        g1 = -(jm + jp) / (3.0 * dnu);
        g2 = g0 - std::sin(phys::pi * dnu) / (phys::pi * dnu);
        g3 = 0.5 * dnu * g0 + g1;
    }
    const double ratio2 = 1.0 - (lc / nuc) * (lc / nuc);
    if (ratio2 <= 0.0)
        throw NumericalError("radial_matrix_element: semiclassical form invalid for " +
                             a.label() + " -> " + b.label());
    return 1.5 * nuc * nuc * std::sqrt(ratio2) *
           (g0 + gamma * (g1 + gamma * (g2 + gamma * g3)));
}

}  // namespace rydsim
