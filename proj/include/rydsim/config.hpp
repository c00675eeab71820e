#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/ensemble.hpp"
#include "rydsim/ini.hpp"
#include "rydsim/pulses.hpp"
#include "rydsim/trapstats.hpp"
#include "rydsim/vdw.hpp"

namespace rydsim {

// Reference defaults, a key registry guarding against typos, and builders
// that turn the merged document into module parameter structs.
class RunConfig {
  public:
    static IniDoc defaults() {
        IniDoc d;
        d.set("run", "seed", "1");
        d.set("run", "threads", "0");
        d.set("run", "constants_file", "");

        d.set("beams", "power_lower_uw", "1.85");
        d.set("beams", "power_upper_mw", "10.7");
        d.set("beams", "waist_lower_um", "10");
        d.set("beams", "waist_upper_um", "10");
        d.set("beams", "detuning_red_ghz", "3.4");

        d.set("pulse", "rabi_mhz", "");        // empty: derive from beams
        d.set("pulse", "delta2_mhz", "0");
        d.set("pulse", "t_max_us", "16");
        d.set("pulse", "t_points", "321");
        d.set("pulse", "samples", "4000");

        d.set("double_pulse", "rabi_mhz", "0.7");
        d.set("double_pulse", "gap_us", "2");
        d.set("double_pulse", "gap_detuning_mhz", "");  // empty: ground light shift
        d.set("double_pulse", "detuning_red_ghz", "3.8");
        d.set("double_pulse", "power_lower_uw", "3.3");
        d.set("double_pulse", "t_on_max_us", "2.2");
        d.set("double_pulse", "t_points", "56");
        d.set("double_pulse", "samples", "3000");

        d.set("doppler", "temperature_mk", "1.0");
        d.set("doppler", "enabled", "true");

        d.set("cloud", "sigma_x_um", "3.9");
        d.set("cloud", "sigma_y_um", "0.43");
        d.set("cloud", "sigma_z_um", "0.43");

        d.set("interaction", "c6_ghz_um6", "450");
        d.set("interaction", "n", "43");
        d.set("interaction", "reference_channel", "f7");
        d.set("interaction", "force_zero", "false");
        d.set("interaction", "theta_bins", "180");
        d.set("interaction", "overlap_theta_deg", "90");

        d.set("mc", "n_mean", "1.7");
        d.set("mc", "n_cap", "10");
        d.set("mc", "rabi_mhz", "0.49");
        d.set("mc", "delta2_mhz", "0");
        d.set("mc", "pump_fidelity", "1.0");
        d.set("mc", "min_pair_um", "0.05");
        d.set("mc", "trials", "2000");
        d.set("mc", "t_max_us", "4");
        d.set("mc", "t_points", "81");

        d.set("trap", "depth_mk", "10");
        d.set("trap", "waist_um", "2.7");
        d.set("trap", "wavelength_nm", "1030");

        d.set("detection", "count_rate_per_atom_s", "10000");
        d.set("detection", "bg_rate_s", "1000");
        d.set("detection", "probe_ms", "12");
        d.set("detection", "duty", "2.5");

        d.set("loss", "lifetime_s", "3");
        d.set("loss", "probe_survival", "0.88");
        d.set("loss", "pair_loss_rate_s", "500");

        d.set("preselect", "n_mean", "1.7");
        d.set("preselect", "trials", "20000");

        d.set("histogram", "n_mean", "1.7");
        d.set("histogram", "trials", "20000");

        d.set("drop", "temperature_mk", "1.0");
        d.set("drop", "t_max_us", "60");
        d.set("drop", "t_points", "13");
        d.set("drop", "trials", "4000");

        d.set("thermometry", "trials", "2000");
        return d;
    }

    static RunConfig from(const IniDoc& overlay) {
        RunConfig rc;
        rc.doc_ = defaults();
        validate_keys(overlay);
        for (const auto& [section, sec] : overlay.sections())
            for (const auto& [k, v] : sec) rc.doc_.set(section, k, v);
        rc.atoms_ = AtomicConstants::resolve(rc.doc_.get_or("run", "constants_file", ""));
        return rc;
    }

    static void validate_keys(const IniDoc& doc) {
        const IniDoc ref = defaults();
        for (const auto& [section, sec] : doc.sections()) {
            auto it = ref.sections().find(section);
            if (it == ref.sections().end()) {
                std::string known;
                for (const auto& [name, s] : ref.sections()) known += name + " ";
                throw ConfigError("unknown config section [" + section + "]; known: " + known);
            }
            for (const auto& [k, v] : sec) {
                if (!it->second.count(k)) {
                    std::string known;
                    for (const auto& [kk, vv] : it->second) known += kk + " ";
                    throw ConfigError("unknown key '" + k + "' in [" + section +
                                      "]; known: " + known);
                }
            }
        }
    }

    const IniDoc& doc() const { return doc_; }
    IniDoc& doc() { return doc_; }
    const AtomicConstants& atoms() const { return atoms_; }

    std::uint64_t seed() const {
        return static_cast<std::uint64_t>(doc_.get_int("run", "seed"));
    }
    int threads() const { return static_cast<int>(doc_.get_int("run", "threads")); }

    // thread count is an execution detail: outputs must hash the same however
    // many workers produced them
    std::uint64_t hash() const {
        IniDoc normalized = doc_;
        normalized.set("run", "threads", "0");
        return normalized.hash();
    }

    QuantumDefectModel defect_model() const { return QuantumDefectModel(atoms_); }

    BeamParams beam_lower(const std::string& section = "beams") const {
        BeamParams b;
        b.power_w = doc_.get_double(section, "power_lower_uw") * 1e-6;
        b.waist_um = doc_.get_double("beams", "waist_lower_um");
        b.wavelength_nm = atoms_.lambda_lower_nm;
        return b;
    }

    BeamParams beam_upper() const {
        BeamParams b;
        b.power_w = doc_.get_double("beams", "power_upper_mw") * 1e-3;
        b.waist_um = doc_.get_double("beams", "waist_upper_um");
        b.wavelength_nm = atoms_.lambda_upper_nm;
        return b;
    }

    // effective dipoles of the two legs (e a0)
    double dipole_lower_ea0() const { return atoms_.d_lower_ea0; }

    double dipole_upper_ea0() const {
        const QuantumDefectModel qd = defect_model();
        const int n = static_cast<int>(doc_.get_int("interaction", "n"));
        const RydbergLevel p5(5, 1, half_twice(3));
        const RydbergLevel d(n, 2, half_twice(5));
        const double radial = radial_matrix_element_a0(qd, p5, d);
        const double ang = c1_fine_structure(1, half_twice(3), half_twice(1), 2,
                                             half_twice(5), 0);
        return atoms_.kappa_upper * ang * radial;
    }

    PulseParams pulse_from_beams(const std::string& beam_section, double detuning_red_ghz,
                                 double delta2_mhz) const {
        const PulseParams p = rabi_from_beams(
            beam_lower(beam_section), beam_upper(), dipole_lower_ea0(), dipole_upper_ea0(),
            phys::two_pi * detuning_red_ghz * 1e9, phys::two_pi * delta2_mhz * 1e6);
        return p;
    }

    // [pulse]: derived from the beams unless rabi_mhz overrides it
    PulseParams single_pulse() const {
        const double delta2_mhz = doc_.get_double("pulse", "delta2_mhz");
        if (!doc_.get("pulse", "rabi_mhz").empty()) {
            PulseParams p;
            const double om = phys::two_pi * doc_.get_double("pulse", "rabi_mhz") * 1e6;
            // represent a direct rabi override as symmetric legs far detuned
            p.delta_interm_rad_s = phys::two_pi * doc_.get_double("beams", "detuning_red_ghz") * 1e9;
            p.omega_lower_rad_s = std::sqrt(std::abs(2.0 * om * p.delta_interm_rad_s));
            p.omega_upper_rad_s = p.omega_lower_rad_s;
            p.delta2_rad_s = phys::two_pi * delta2_mhz * 1e6;
            return p;
        }
        return pulse_from_beams("beams", doc_.get_double("beams", "detuning_red_ghz"),
                                delta2_mhz);
    }

    DopplerModel doppler() const {
        if (!doc_.get_bool_or("doppler", "enabled", true)) {
            DopplerModel d;
            d.mass_kg = atoms_.mass_kg;
            return d;  // zero temperature: no dephasing
        }
        return DopplerModel::copropagating(
            atoms_, doc_.get_double("doppler", "temperature_mk") * 1e-3);
    }

    CloudGeometry cloud() const {
        CloudGeometry c;
        c.sigma_x_um = doc_.get_double("cloud", "sigma_x_um");
        c.sigma_y_um = doc_.get_double("cloud", "sigma_y_um");
        c.sigma_z_um = doc_.get_double("cloud", "sigma_z_um");
        return c;
    }

    RefChannel reference_channel() const {
        const std::string v = doc_.get("interaction", "reference_channel");
        if (v == "f7") return RefChannel::f7;
        if (v == "f5") return RefChannel::f5;
        throw ConfigError("[interaction] reference_channel must be f5 or f7, got '" + v + "'");
    }

    VdwModel vdw_model() const {
        return VdwModel::build(defect_model(),
                               static_cast<int>(doc_.get_int("interaction", "n")),
                               reference_channel(),
                               doc_.get_double("interaction", "c6_ghz_um6"));
    }

    EigenmodeSampler eigenmode_sampler() const {
        return EigenmodeSampler(vdw_model(),
                                static_cast<int>(doc_.get_int("interaction", "theta_bins")));
    }

    EnsembleConfig ensemble() const {
        EnsembleConfig e;
        e.n_mean = doc_.get_double("mc", "n_mean");
        e.n_cap = static_cast<int>(doc_.get_int("mc", "n_cap"));
        e.cloud = cloud();
        e.rabi_rad_s = phys::two_pi * doc_.get_double("mc", "rabi_mhz") * 1e6;
        e.delta2_rad_s = phys::two_pi * doc_.get_double("mc", "delta2_mhz") * 1e6;
        e.doppler = doppler();
        e.c6_ghz_um6 = doc_.get_double("interaction", "c6_ghz_um6");
        e.pump_fidelity = doc_.get_double("mc", "pump_fidelity");
        e.min_pair_um = doc_.get_double("mc", "min_pair_um");
        e.force_zero_interaction = doc_.get_bool_or("interaction", "force_zero", false);
        e.trials = doc_.get_int("mc", "trials");
        e.seed = seed();
        e.threads = threads();
        return e;
    }

    TrapModel trap() const {
        TrapModel t;
        t.depth_mk = doc_.get_double("trap", "depth_mk");
        t.waist_um = doc_.get_double("trap", "waist_um");
        t.wavelength_nm = doc_.get_double("trap", "wavelength_nm");
        t.mass_kg = atoms_.mass_kg;
        return t;
    }

    DetectionModel detection() const {
        DetectionModel m;
        m.count_rate_per_atom_s = doc_.get_double("detection", "count_rate_per_atom_s");
        m.bg_rate_s = doc_.get_double("detection", "bg_rate_s");
        m.probe_s = doc_.get_double("detection", "probe_ms") * 1e-3;
        m.duty = doc_.get_double("detection", "duty");
        return m;
    }

    LossModel loss() const {
        LossModel l;
        l.lifetime_s = doc_.get_double("loss", "lifetime_s");
        l.probe_survival = doc_.get_double("loss", "probe_survival");
        l.pair_loss_rate_s = doc_.get_double("loss", "pair_loss_rate_s");
        return l;
    }

    std::vector<double> time_grid_s(const std::string& section, const char* max_key,
                                    const char* points_key) const {
        const double tmax = doc_.get_double(section, max_key) * 1e-6;
        const long npts = doc_.get_int(section, points_key);
        if (npts < 2 || tmax <= 0.0)
            throw ConfigError("[" + section + "] needs " + std::string(max_key) + " > 0 and " +
                              points_key + " >= 2");
        std::vector<double> t(npts);
        for (long i = 0; i < npts; ++i) t[i] = tmax * i / (npts - 1);
        return t;
    }

  private:
    IniDoc doc_;
    AtomicConstants atoms_;
};

}  // namespace rydsim
