#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "rydsim/ini.hpp"

namespace rydsim {

// CODATA 2018 exact / recommended values (SI)
namespace phys {
inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double c_m_s = 2.99792458e8;
inline constexpr double h_j_s = 6.62607015e-34;
inline constexpr double hbar_j_s = 1.054571817e-34;
inline constexpr double e_c = 1.602176634e-19;
inline constexpr double eps0_f_m = 8.8541878128e-12;
inline constexpr double kb_j_k = 1.380649e-23;
inline constexpr double a0_m = 5.29177210903e-11;
inline constexpr double mu_b_hz_t = 1.39962449361e10;  // Bohr magneton / h
inline constexpr double g_m_s2 = 9.80665;
}  // namespace phys

// Rydberg-Ritz series: delta(n) = d0 + d2 / (n - d0)^2
struct DefectSeries {
    double d0 = 0.0;
    double d2 = 0.0;
};

// Atomic dataset: mass, Rydberg constant, quantum-defect table and the
// dipole calibration constants for the two-photon drive. Values can be
// overridden from an INI file (see share/rb87_constants.ini).
class AtomicConstants {
  public:
    double mass_kg = 0.0;
    double rydberg_hz = 0.0;          // mass-corrected Rydberg constant, as frequency
    double lambda_lower_nm = 0.0;     // lower leg of the two-photon drive
    double lambda_upper_nm = 0.0;     // upper leg
    double d_lower_ea0 = 0.0;         // effective lower-leg dipole (pi transition)
    double d_line_ea0 = 0.0;          // fine-structure reduced dipole of the lower line
    double kappa_upper = 0.0;         // upper-leg dipole calibration factor
    std::string name;

    // key: (l, 2j)
    std::map<std::pair<int, int>, DefectSeries> defects;

    bool has_series(int l, int twoj) const { return defects.count({l, twoj}) > 0; }

    const DefectSeries& series(int l, int twoj) const {
        auto it = defects.find({l, twoj});
        if (it == defects.end()) {
            std::ostringstream msg;
            msg << name << ": no quantum-defect series for l=" << l << ", 2j=" << twoj;
            throw ConfigError(msg.str());
        }
        return it->second;
    }

    static AtomicConstants rb87() {
        AtomicConstants a;
        a.name = "rb87";
        a.mass_kg = 1.44316060e-25;
        a.rydberg_hz = 3.2898211945526e15;
        a.lambda_lower_nm = 780.241;
        a.lambda_upper_nm = 480.0;
        a.d_line_ea0 = 4.22754;
        a.d_lower_ea0 = 1.7258860;    // d_line / sqrt(6): pi path through the upper hyperfine line
        a.kappa_upper = 0.40706352;   // calibrated against the reference drive strength
        a.defects[{0, 1}] = {3.1311804, 0.1784};
        a.defects[{1, 1}] = {2.6548849, 0.2900};
        a.defects[{1, 3}] = {2.6416737, 0.2950};
        a.defects[{2, 3}] = {1.34809171, -0.60286};
        a.defects[{2, 5}] = {1.34646572, -0.59600};
        a.defects[{3, 5}] = {0.0165192, -0.085};
        a.defects[{3, 7}] = {0.0165437, -0.086};
        return a;
    }

    // Override any subset of the builtin values from an INI file with an
    // [atom] section and defect_<l-letter><2j> keys like "defect_d5 = 1.3465, -0.596".
    static AtomicConstants from_ini(const IniDoc& doc) {
        AtomicConstants a = rb87();
        if (!doc.sections().count("atom")) throw ConfigError("constants file: missing [atom] section");
        a.name = doc.get_or("atom", "name", a.name);
        a.mass_kg = doc.get_double_or("atom", "mass_kg", a.mass_kg);
        a.rydberg_hz = doc.get_double_or("atom", "rydberg_hz", a.rydberg_hz);
        a.lambda_lower_nm = doc.get_double_or("atom", "lambda_lower_nm", a.lambda_lower_nm);
        a.lambda_upper_nm = doc.get_double_or("atom", "lambda_upper_nm", a.lambda_upper_nm);
        a.d_lower_ea0 = doc.get_double_or("atom", "d_lower_ea0", a.d_lower_ea0);
        a.d_line_ea0 = doc.get_double_or("atom", "d_line_ea0", a.d_line_ea0);
        a.kappa_upper = doc.get_double_or("atom", "kappa_upper", a.kappa_upper);
        static const struct { const char* key; int l, twoj; } series_keys[] = {
            {"defect_s1", 0, 1}, {"defect_p1", 1, 1}, {"defect_p3", 1, 3},
            {"defect_d3", 2, 3}, {"defect_d5", 2, 5}, {"defect_f5", 3, 5},
            {"defect_f7", 3, 7},
        };
        for (const auto& sk : series_keys) {
            if (!doc.has("atom", sk.key)) continue;
            std::string v = doc.get("atom", sk.key);
            auto comma = v.find(',');
            if (comma == std::string::npos)
                throw ConfigError(std::string("constants file: ") + sk.key +
                                  " must be 'd0, d2'");
            try {
                a.defects[{sk.l, sk.twoj}] = {std::stod(v.substr(0, comma)),
                                              std::stod(v.substr(comma + 1))};
            } catch (const std::exception&) {
                throw ConfigError(std::string("constants file: bad numbers in ") + sk.key);
            }
        }
        return a;
    }

    static AtomicConstants from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open constants file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_ini(IniDoc::parse(buf.str()));
    }

    // builtin, unless RYDSIM_CONSTANTS or an explicit path points at a file
    static AtomicConstants resolve(const std::string& explicit_path = "") {
        if (!explicit_path.empty()) return from_file(explicit_path);
        if (const char* env = std::getenv("RYDSIM_CONSTANTS"); env && *env)
            return from_file(env);
        return rb87();
    }
};

}  // namespace rydsim
