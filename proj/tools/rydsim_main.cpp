// Command-line front end: every subcommand reads an ini config (all keys
// optional, defaults built in), runs one computation, and writes CSV plus a
// config echo next to it.  Output is a pure function of (config, seed).
#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rydsim/rydsim.hpp"

namespace {

using namespace rydsim;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string constants_path;
    std::vector<std::string> overrides;
    long long seed = -1;  // <0: take [run] seed from config
    int threads = -1;     // <0: take [run] threads from config
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--config", opt.config_path, "ini config file (every key optional)");
    cmd->add_option("--set", opt.overrides, "override one key, section.key=value")
        ->take_all();
    cmd->add_option("--out", opt.out_path,
                    "write CSV to this file (and the resolved config to <out>.config.ini); "
                    "default: stdout");
    cmd->add_option("--seed", opt.seed, "override [run] seed");
    cmd->add_option("--threads", opt.threads, "override [run] threads (0 = hardware)");
    cmd->add_option("--constants", opt.constants_path, "atomic-constants ini file");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IniDoc build_overlay(const CommonOpts& opt) {
    IniDoc overlay;
    if (!opt.config_path.empty()) overlay = IniDoc::parse(read_file(opt.config_path));
    for (const auto& s : opt.overrides) overlay.set_dotted(s);
    if (opt.seed >= 0) overlay.set("run", "seed", std::to_string(opt.seed));
    if (opt.threads >= 0) overlay.set("run", "threads", std::to_string(opt.threads));
    if (!opt.constants_path.empty()) overlay.set("run", "constants_file", opt.constants_path);
    return overlay;
}

RunConfig load_config(const CommonOpts& opt) { return RunConfig::from(build_overlay(opt)); }

void emit(const CommonOpts& opt, const RunConfig& rc, const std::string& text) {
    if (opt.out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    write_text_file(opt.out_path, text);
    write_text_file(opt.out_path + ".config.ini", rc.doc().serialize());
}

// ---------------------------------------------------------------- levels ---

RydbergLevel parse_level(const std::string& label) {
    std::size_t i = 0;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) ++i;
    if (i == 0 || i >= label.size()) throw ConfigError("bad level label: '" + label + "'");
    const int n = std::stoi(label.substr(0, i));
    static const std::string letters = "spdfghik";
    const auto lpos = letters.find(
        static_cast<char>(std::tolower(static_cast<unsigned char>(label[i]))));
    if (lpos == std::string::npos)
        throw ConfigError("bad orbital letter in level label: '" + label + "'");
    const int l = static_cast<int>(lpos);
    const std::string jtxt = label.substr(i + 1);
    if (jtxt.empty()) throw ConfigError("level label needs j, e.g. 43d5/2: '" + label + "'");
    int tj = 0;
    try {
        if (const auto slash = jtxt.find('/'); slash != std::string::npos) {
            if (jtxt.substr(slash + 1) != "2")
                throw ConfigError("j must be k/2 in level label: '" + label + "'");
            tj = std::stoi(jtxt.substr(0, slash));
        } else {
            tj = 2 * std::stoi(jtxt);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad j in level label: '" + label + "'");
    }
    return RydbergLevel(n, l, half_twice(tj));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t p = 0;
    while (true) {
        const auto q = s.find(sep, p);
        out.push_back(s.substr(p, q == std::string::npos ? q : q - p));
        if (q == std::string::npos) break;
        p = q + 1;
    }
    return out;
}

ForsterChannel parse_channel(const std::string& text) {
    const auto sides = split(text, '>');
    if (sides.size() != 2)
        throw ConfigError("channel must look like a+b>c+d: '" + text + "'");
    const auto in = split(sides[0], '+');
    const auto out = split(sides[1], '+');
    if (in.size() != 2 || out.size() != 2)
        throw ConfigError("channel needs two levels on each side of '>': '" + text + "'");
    ForsterChannel ch;
    ch.a_in = parse_level(in[0]);
    ch.b_in = parse_level(in[1]);
    ch.a_out = parse_level(out[0]);
    ch.b_out = parse_level(out[1]);
    return ch;
}

std::string channel_label(const ForsterChannel& ch) {
    return ch.a_in.label() + "+" + ch.b_in.label() + ">" + ch.a_out.label() + "+" +
           ch.b_out.label();
}

int cmd_levels(const CommonOpts& opt, const std::vector<std::string>& items) {
    const RunConfig rc = load_config(opt);
    const QuantumDefectModel model = rc.defect_model();

    std::vector<std::string> requested = items;
    if (requested.empty()) {
        const int n = static_cast<int>(rc.doc().get_int("interaction", "n"));
        const auto lv = [](int nn, const char* suffix) {
            return std::to_string(nn) + suffix;
        };
        requested = {lv(n, "d5/2"), lv(n + 2, "p3/2"), lv(n - 2, "f5/2"), lv(n - 2, "f7/2"),
                     "5p3/2",
                     lv(n, "d5/2") + "+" + lv(n, "d5/2") + ">" + lv(n + 2, "p3/2") + "+" +
                         lv(n - 2, "f5/2"),
                     lv(n, "d5/2") + "+" + lv(n, "d5/2") + ">" + lv(n + 2, "p3/2") + "+" +
                         lv(n - 2, "f7/2")};
    }

    struct LevelRow {
        RydbergLevel lv;
        double nstar, defect, e_ghz;
    };
    struct ChannelRow {
        std::string label;
        double defect_mhz;
    };
    std::vector<LevelRow> levels;
    std::vector<ChannelRow> channels;
    for (const auto& item : requested) {
        if (item.find('>') != std::string::npos) {
            const ForsterChannel ch = parse_channel(item);
            channels.push_back({channel_label(ch), forster_defect_hz(model, ch) / 1e6});
        } else {
            const RydbergLevel lv = parse_level(item);
            levels.push_back({lv, model.nstar(lv), model.defect(lv.n, lv.l, lv.j),
                              level_energy_hz(model, lv) / 1e9});
        }
    }

    std::string text;
    char line[192];
    if (opt.out_path.empty()) {
        if (!levels.empty()) {
            std::snprintf(line, sizeof(line), "%-10s %12s %12s %14s\n", "level", "n*",
                          "defect", "E/h (GHz)");
            text += line;
            for (const auto& r : levels) {
                std::snprintf(line, sizeof(line), "%-10s %12.6f %12.6f %14.4f\n",
                              r.lv.label().c_str(), r.nstar, r.defect, r.e_ghz);
                text += line;
            }
        }
        if (!channels.empty()) {
            if (!levels.empty()) text += "\n";
            std::snprintf(line, sizeof(line), "%-44s %14s\n", "channel", "defect (MHz)");
            text += line;
            for (const auto& r : channels) {
                std::snprintf(line, sizeof(line), "%-44s %14.4f\n", r.label.c_str(),
                              r.defect_mhz);
                text += line;
            }
        }
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 0;
    }

    char head[96];
    std::snprintf(head, sizeof(head), "# config_hash=%016llx\n# seed=%llu\n",
                  static_cast<unsigned long long>(rc.hash()),
                  static_cast<unsigned long long>(rc.seed()));
    text = head;
    text += "label,n,l,two_j,nstar,defect,energy_ghz,forster_defect_mhz\n";
    for (const auto& r : levels) {
        std::snprintf(line, sizeof(line), "%s,%d,%d,%d,%.10g,%.10g,%.10g,\n",
                      r.lv.label().c_str(), r.lv.n, r.lv.l, r.lv.j.tw, r.nstar, r.defect,
                      r.e_ghz);
        text += line;
    }
    for (const auto& r : channels) {
        std::snprintf(line, sizeof(line), "%s,,,,,,,%.10g\n", r.label.c_str(), r.defect_mhz);
        text += line;
    }
    emit(opt, rc, text);
    return 0;
}

// --------------------------------------------------------- vdw spectrum ---

int cmd_vdw_spectrum(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const VdwModel model = rc.vdw_model();
    auto modes = model.eigenmodes();
    const double theta =
        rc.doc().get_double("interaction", "overlap_theta_deg") * phys::pi / 180.0;
    excited_state_overlaps(modes, theta);

    CsvTable tab;
    tab.header = "mode,m_total,d_phi,kappa2,symmetric";
    tab.comments.push_back("reference_channel=" + rc.doc().get("interaction",
                                                               "reference_channel"));
    tab.comments.push_back("c6_ghz_um6=" +
                           rc.doc().get("interaction", "c6_ghz_um6"));
    tab.comments.push_back("overlap_theta_deg=" +
                           rc.doc().get("interaction", "overlap_theta_deg"));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        tab.rows.push_back({static_cast<double>(i), static_cast<double>(m.m_total), m.d_phi,
                            m.kappa2(), m.symmetric ? 1.0 : 0.0});
    }
    emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
    return 0;
}

// ----------------------------------------------------------------- rabi ---

int cmd_rabi(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const PulseParams pulse = rc.single_pulse();
    const auto grid = rc.time_grid_s("pulse", "t_max_us", "t_points");
    const int samples = static_cast<int>(rc.doc().get_int("pulse", "samples"));
    const TraceResult tr =
        doppler_averaged_flop(pulse, rc.doppler(), grid, samples, rc.seed());
    emit(opt, rc, trace_to_csv(tr, rc.hash(), rc.seed(), "p_ground_mean"));
    return 0;
}

// ----------------------------------------------------------- double pulse ---

PulseParams double_pulse_params(const RunConfig& rc) {
    PulseParams p;
    p.delta_interm_rad_s =
        phys::two_pi * rc.doc().get_double("double_pulse", "detuning_red_ghz") * 1e9;
    const BeamParams lower = rc.beam_lower("double_pulse");
    p.omega_lower_rad_s = dipole_rabi_rad_s(rc.dipole_lower_ea0(), lower.peak_field_v_m());
    const double target =
        phys::two_pi * rc.doc().get_double("double_pulse", "rabi_mhz") * 1e6;
    p.omega_upper_rad_s = 2.0 * target * p.delta_interm_rad_s / p.omega_lower_rad_s;
    p.delta2_rad_s = 0.0;
    return p;
}

int cmd_double_pulse(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const PulseParams pulse = double_pulse_params(rc);
    const std::string gap_key = rc.doc().get("double_pulse", "gap_detuning_mhz");
    const double gap_det_rad_s =
        gap_key.empty() ? pulse.light_shift_ground_rad_s()
                        : phys::two_pi * rc.doc().get_double("double_pulse",
                                                             "gap_detuning_mhz") * 1e6;
    const double gap_s = rc.doc().get_double("double_pulse", "gap_us") * 1e-6;
    const auto grid = rc.time_grid_s("double_pulse", "t_on_max_us", "t_points");
    const int samples = static_cast<int>(rc.doc().get_int("double_pulse", "samples"));
    TraceResult tr = double_pulse_curve(pulse, gap_s, gap_det_rad_s, grid, rc.doppler(),
                                        samples, rc.seed());
    for (auto& v : tr.value) v = 1.0 - v;  // report ground-state retention
    emit(opt, rc, trace_to_csv(tr, rc.hash(), rc.seed(), "p_ground_mean"));
    return 0;
}

// ------------------------------------------------------------- ensemble ---

int cmd_ensemble(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const EnsembleConfig cfg = rc.ensemble();
    const EigenmodeSampler sampler = rc.eigenmode_sampler();
    const auto grid = rc.time_grid_s("mc", "t_max_us", "t_points");
    const TraceResult tr = retention_signal(cfg, sampler, grid);
    emit(opt, rc, trace_to_csv(tr, rc.hash(), rc.seed(), "signal"));
    return 0;
}

// ------------------------------------------------------ counting windows ---

int cmd_histogram(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const auto hist = readout_histogram(rc.doc().get_double("histogram", "n_mean"),
                                        rc.detection(), rc.loss(),
                                        rc.doc().get_int("histogram", "trials"), rc.seed());
    CsvTable tab;
    tab.header = "counts,occurrences";
    tab.comments.push_back("n_mean=" + rc.doc().get("histogram", "n_mean"));
    tab.comments.push_back("trials=" + rc.doc().get("histogram", "trials"));
    for (const auto& [counts, occ] : hist)
        tab.rows.push_back({static_cast<double>(counts), static_cast<double>(occ)});
    emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
    return 0;
}

int cmd_preselect(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const PreselectionResult res = preselection_experiment(
        rc.doc().get_double("preselect", "n_mean"), rc.detection(), rc.loss(),
        rc.doc().get_int("preselect", "trials"), rc.seed());
    CsvTable tab;
    tab.header = "first,second,occurrences";
    char buf[96];
    tab.comments.push_back("trials=" + std::to_string(res.trials));
    tab.comments.push_back("n_first1=" + std::to_string(res.n_first1));
    std::snprintf(buf, sizeof(buf), "p_second1_given_first1=%.10g",
                  res.p_second1_given_first1);
    tab.comments.push_back(buf);
    for (const auto& [key, occ] : res.joint)
        tab.rows.push_back({static_cast<double>(key.first), static_cast<double>(key.second),
                            static_cast<double>(occ)});
    emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
    return 0;
}

// --------------------------------------------------------- drop/recapture ---

int cmd_drop_recapture(const CommonOpts& opt) {
    const RunConfig rc = load_config(opt);
    const TrapModel trap = rc.trap();
    const double temp_k = rc.doc().get_double("drop", "temperature_mk") * 1e-3;
    const auto grid = rc.time_grid_s("drop", "t_max_us", "t_points");
    const long trials = rc.doc().get_int("drop", "trials");
    const TraceResult tr = drop_recapture(trap, temp_k, grid, trials, rc.seed());
    const TemperatureEstimate est =
        estimate_temperature(grid, tr.value, tr.stderr_, trap,
                             rc.doc().get_int("thermometry", "trials"), rc.seed());

    CsvTable tab;
    tab.header = "t_drop_us,recapture,stderr";
    char buf[96];
    tab.comments.push_back("trials=" + std::to_string(trials));
    std::snprintf(buf, sizeof(buf), "true_temperature_mk=%.10g", temp_k * 1e3);
    tab.comments.push_back(buf);
    std::snprintf(buf, sizeof(buf), "estimated_temperature_mk=%.10g",
                  est.temperature_k * 1e3);
    tab.comments.push_back(buf);
    std::snprintf(buf, sizeof(buf), "estimated_err_mk=%.10g", est.err_k * 1e3);
    tab.comments.push_back(buf);
    tab.comments.push_back(std::string("converged=") + (est.converged ? "1" : "0"));
    for (std::size_t i = 0; i < grid.size(); ++i)
        tab.rows.push_back({grid[i] * 1e6, tr.value[i], tr.stderr_[i]});
    emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
    return 0;
}

// ------------------------------------------------------------------ fit ---

int cmd_fit(const CommonOpts& opt, const std::string& input) {
    const RunConfig rc = load_config(opt);
    const TraceResult tr = trace_from_csv_text(read_file(input));
    if (tr.t_s.size() < 4) throw ConfigError("fit: input has fewer than 4 usable rows");
    bool have_sigma = !tr.stderr_.empty();
    for (const double s : tr.stderr_) have_sigma = have_sigma && s > 0.0;
    const std::vector<double> sigma = have_sigma ? tr.stderr_ : std::vector<double>{};
    const FitResult fit = fit_damped_cosine(tr.t_s, tr.value, sigma);

    const double f_mhz = fit.model.omega_rad_s / phys::two_pi / 1e6;
    const double f_err_mhz = fit.omega_err_rad_s / phys::two_pi / 1e6;
    if (opt.out_path.empty()) {
        std::printf("a        = %.6g +- %.3g\n", fit.model.a, fit.a_err);
        std::printf("tau_us   = %.6g +- %.3g\n", fit.model.tau_s * 1e6,
                    fit.tau_err_s * 1e6);
        std::printf("f_mhz    = %.6g +- %.3g\n", f_mhz, f_err_mhz);
        std::printf("sse      = %.6g\n", fit.sse);
        std::printf("points   = %zu\n", tr.t_s.size());
        std::printf("converged  = %s\n", fit.converged ? "yes" : "no");
        std::printf("degenerate = %s\n", fit.degenerate ? "yes" : "no");
    } else {
        CsvTable tab;
        tab.header = "a,a_err,tau_us,tau_err_us,f_mhz,f_err_mhz,sse,iterations,converged,"
                     "degenerate";
        tab.comments.push_back("input=" + input);
        tab.rows.push_back({fit.model.a, fit.a_err, fit.model.tau_s * 1e6,
                            fit.tau_err_s * 1e6, f_mhz, f_err_mhz, fit.sse,
                            static_cast<double>(fit.iterations), fit.converged ? 1.0 : 0.0,
                            fit.degenerate ? 1.0 : 0.0});
        emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
    }
    if (fit.degenerate) {
        std::fprintf(stderr, "fit: no resolvable oscillation in input\n");
        return 3;
    }
    return 0;
}

// ------------------------------------------------------------ reproduce ---

// Canned parameter sets for the bundled demonstration curves.  Each applies
// its pinned keys on top of the user's config, so things like trial counts
// can still be tuned from the command line.
int cmd_reproduce(const CommonOpts& opt, const std::string& target) {
    IniDoc overlay = build_overlay(opt);

    if (target == "fig2") {
        overlay.set("histogram", "n_mean", "1.7");
        const RunConfig rc = RunConfig::from(overlay);
        const double n_mean = rc.doc().get_double("histogram", "n_mean");
        const long trials = rc.doc().get_int("histogram", "trials");
        const auto hist =
            readout_histogram(n_mean, rc.detection(), rc.loss(), trials, rc.seed());
        const PreselectionResult res = preselection_experiment(
            n_mean, rc.detection(), rc.loss(), trials, rc.seed());
        CsvTable tab;
        tab.header = "counts,occurrences";
        char buf[96];
        tab.comments.push_back("trials=" + std::to_string(trials));
        std::snprintf(buf, sizeof(buf), "p_second1_given_first1=%.10g",
                      res.p_second1_given_first1);
        tab.comments.push_back(buf);
        tab.comments.push_back("n_first1=" + std::to_string(res.n_first1));
        for (const auto& [counts, occ] : hist)
            tab.rows.push_back({static_cast<double>(counts), static_cast<double>(occ)});
        emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
        return 0;
    }

    if (target == "fig3") {
        overlay.set("pulse", "rabi_mhz", "0.49");
        const RunConfig rc = RunConfig::from(overlay);
        const auto grid = rc.time_grid_s("pulse", "t_max_us", "t_points");
        const int samples = static_cast<int>(rc.doc().get_int("pulse", "samples"));
        const TraceResult tr = doppler_averaged_flop(rc.single_pulse(), rc.doppler(), grid,
                                                     samples, rc.seed());
        const FitResult fit = fit_damped_cosine(tr.t_s, tr.value, tr.stderr_);
        CsvTable tab;
        tab.header = "t_us,p_ground_mean,stderr";
        char buf[96];
        tab.comments.push_back("trials=" + std::to_string(tr.n_trials));
        std::snprintf(buf, sizeof(buf), "fit_f_mhz=%.10g",
                      fit.model.omega_rad_s / phys::two_pi / 1e6);
        tab.comments.push_back(buf);
        std::snprintf(buf, sizeof(buf), "fit_tau_us=%.10g", fit.model.tau_s * 1e6);
        tab.comments.push_back(buf);
        std::snprintf(buf, sizeof(buf), "fit_a=%.10g", fit.model.a);
        tab.comments.push_back(buf);
        for (std::size_t i = 0; i < tr.t_s.size(); ++i)
            tab.rows.push_back({tr.t_s[i] * 1e6, tr.value[i], tr.stderr_[i]});
        emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
        return 0;
    }

    if (target == "fig4") {
        CommonOpts o = opt;
        return cmd_double_pulse(o);
    }

    if (target == "fig5") {
        return cmd_vdw_spectrum(opt);
    }

    if (target == "fig6") {
        const RunConfig rc = RunConfig::from(overlay);
        const EigenmodeSampler sampler = rc.eigenmode_sampler();
        const auto grid = rc.time_grid_s("mc", "t_max_us", "t_points");
        CsvTable tab;
        tab.header = "nbar,t_us,signal,stderr";
        char buf[96];
        for (const double nbar : {0.3, 1.7, 8.0}) {
            EnsembleConfig cfg = rc.ensemble();
            cfg.n_mean = nbar;
            const TraceResult tr = retention_signal(cfg, sampler, grid);
            std::snprintf(buf, sizeof(buf), "nbar=%.3g trials=%ld truncated_fraction=%.4g",
                          nbar, tr.n_trials, tr.truncated_fraction);
            tab.comments.push_back(buf);
            for (std::size_t i = 0; i < grid.size(); ++i)
                tab.rows.push_back({nbar, grid[i] * 1e6, tr.value[i], tr.stderr_[i]});
        }
        emit(opt, rc, tab.to_csv(rc.hash(), rc.seed()));
        return 0;
    }

    throw ConfigError("unknown reproduce target: '" + target +
                      "' (expected fig2..fig6)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon Rydberg excitation toolkit: level structure, pair "
                 "interactions, pulse dynamics, trap statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rydsim::version()));

    CommonOpts o_levels, o_vdw, o_rabi, o_double, o_ens, o_hist, o_pre, o_drop, o_fit,
        o_rep;
    std::vector<std::string> level_items;
    std::string fit_input, rep_target;

    CLI::App* c_levels = app.add_subcommand(
        "levels", "quantum defects, effective n, energies, pair-resonance defects "
                  "(aligned text on stdout, CSV with --out)");
    c_levels->add_option("items", level_items,
                         "level labels like 43d5/2 or channels like "
                         "43d5/2+43d5/2>45p3/2+41f7/2 (default: canonical set)");
    add_common(c_levels, o_levels);

    CLI::App* c_vdw = app.add_subcommand(
        "vdw-spectrum", "pair-interaction eigenmodes: M, eigenvalue, laser overlap");
    add_common(c_vdw, o_vdw);

    CLI::App* c_rabi = app.add_subcommand(
        "rabi", "Doppler-averaged two-photon flopping curve from [pulse]/[beams]");
    add_common(c_rabi, o_rabi);

    CLI::App* c_double = app.add_subcommand(
        "double-pulse", "two pulses separated by a free gap, from [double_pulse]");
    add_common(c_double, o_double);

    CLI::App* c_ens = app.add_subcommand(
        "ensemble", "many-atom retention signal with pair interactions, from [mc]");
    add_common(c_ens, o_ens);

    CLI::App* c_hist = app.add_subcommand(
        "histogram", "fluorescence count histogram for one readout window");
    add_common(c_hist, o_hist);

    CLI::App* c_pre = app.add_subcommand(
        "preselect", "two-window readout: joint classification table and retention");
    add_common(c_pre, o_pre);

    CLI::App* c_drop = app.add_subcommand(
        "drop-recapture", "release-and-recapture curve plus temperature estimate");
    add_common(c_drop, o_drop);

    CLI::App* c_fit = app.add_subcommand(
        "fit", "fit a damped cosine to a trace CSV (t_us,value[,stderr])");
    c_fit->add_option("input", fit_input, "trace CSV file")->required();
    add_common(c_fit, o_fit);

    CLI::App* c_rep = app.add_subcommand(
        "reproduce", "canned demonstration curves: fig2, fig3, fig4, fig5, fig6");
    c_rep->add_option("target", rep_target, "one of fig2..fig6")->required();
    add_common(c_rep, o_rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_levels->parsed()) return cmd_levels(o_levels, level_items);
        if (c_vdw->parsed()) return cmd_vdw_spectrum(o_vdw);
        if (c_rabi->parsed()) return cmd_rabi(o_rabi);
        if (c_double->parsed()) return cmd_double_pulse(o_double);
        if (c_ens->parsed()) return cmd_ensemble(o_ens);
        if (c_hist->parsed()) return cmd_histogram(o_hist);
        if (c_pre->parsed()) return cmd_preselect(o_pre);
        if (c_drop->parsed()) return cmd_drop_recapture(o_drop);
        if (c_fit->parsed()) return cmd_fit(o_fit, fit_input);
        if (c_rep->parsed()) return cmd_reproduce(o_rep, rep_target);
    } catch (const rydsim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const rydsim::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
