#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rydsim/ini.hpp"

namespace rydsim {

// A sampled signal versus time plus its Monte Carlo uncertainty.
struct TraceResult {
    std::vector<double> t_s;
    std::vector<double> value;
    std::vector<double> stderr_;
    long n_trials = 0;
    double truncated_fraction = 0.0;  // probability mass above the atom-number cap

    std::size_t size() const { return t_s.size(); }
};

namespace tracedetail {
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}
}  // namespace tracedetail

// Canonical CSV form: comment header with config hash and seed, then one row
// per sample. Deterministic bytes for fixed inputs.
inline std::string trace_to_csv(const TraceResult& tr, std::uint64_t config_hash,
                                std::uint64_t seed, const std::string& value_name = "signal") {
    std::string out;
    char head[128];
    std::snprintf(head, sizeof(head), "# config_hash=%016llx\n# seed=%llu\n",
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    out += head;
    if (tr.n_trials > 0) out += "# trials=" + std::to_string(tr.n_trials) + "\n";
    if (tr.truncated_fraction > 0.0)
        out += "# truncated_fraction=" + tracedetail::fmt(tr.truncated_fraction) + "\n";
    out += "t_us," + value_name + ",stderr\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        out += tracedetail::fmt(tr.t_s[i] * 1e6);
        out += ',';
        out += tracedetail::fmt(tr.value[i]);
        out += ',';
        out += tracedetail::fmt(i < tr.stderr_.size() ? tr.stderr_[i] : 0.0);
        out += '\n';
    }
    return out;
}

// Generic small table with the same comment header convention.
struct CsvTable {
    std::string header;                       // comma-separated column names
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;        // extra "# ..." lines

    std::string to_csv(std::uint64_t config_hash, std::uint64_t seed) const {
        std::string out;
        char head[128];
        std::snprintf(head, sizeof(head), "# config_hash=%016llx\n# seed=%llu\n",
                      static_cast<unsigned long long>(config_hash),
                      static_cast<unsigned long long>(seed));
        out += head;
        for (const auto& c : comments) out += "# " + c + "\n";
        out += header + "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += tracedetail::fmt(row[i]);
            }
            out += '\n';
        }
        return out;
    }
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

// Parse a trace CSV produced by trace_to_csv (comments ignored); expects a
// t_us column first, then a value column, optionally stderr.
inline TraceResult trace_from_csv_text(const std::string& text) {
    TraceResult tr;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // header row
            header_seen = true;
            continue;
        }
        std::vector<double> vals;
        std::size_t p = 0;
        while (p <= line.size()) {
            std::size_t q = line.find(',', p);
            if (q == std::string::npos) q = line.size();
            try {
                vals.push_back(std::stod(line.substr(p, q - p)));
            } catch (const std::exception&) {
                throw ConfigError("bad CSV number: '" + line.substr(p, q - p) + "'");
            }
            p = q + 1;
        }
        if (vals.size() < 2) throw ConfigError("CSV rows need at least t_us,value");
        tr.t_s.push_back(vals[0] * 1e-6);
        tr.value.push_back(vals[1]);
        tr.stderr_.push_back(vals.size() > 2 ? vals[2] : 0.0);
    }
    return tr;
}

}  // namespace rydsim
