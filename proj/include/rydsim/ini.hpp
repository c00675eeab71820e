#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}
}  // namespace detail

// Minimal INI document: [section] lines, key = value lines, '#' or ';'
// comments. Keys are stored sorted, so serialization is canonical and the
// 64-bit FNV-1a hash of the serialized form identifies a configuration.
class IniDoc {
  public:
    using Section = std::map<std::string, std::string>;

    IniDoc() = default;

    static IniDoc parse(const std::string& text) {
        IniDoc doc;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = detail::trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("ini parse error, line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = detail::trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("ini parse error, line " + std::to_string(lineno) +
                                      ": empty section name");
                doc.sections_[section];
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("ini parse error, line " + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = detail::trim(s.substr(0, eq));
            std::string val = detail::trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError("ini parse error, line " + std::to_string(lineno) +
                                  ": empty key");
            doc.sections_[section][key] = val;
        }
        return doc;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        sections_[section][key] = value;
    }

    // "section.key=value" as accepted on the command line
    void set_dotted(const std::string& assignment) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must look like section.key=value: " + assignment);
        std::string path = detail::trim(assignment.substr(0, eq));
        std::string value = detail::trim(assignment.substr(eq + 1));
        auto dot = path.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
            throw ConfigError("override must look like section.key=value: " + assignment);
        set(path.substr(0, dot), path.substr(dot + 1), value);
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        if (it == sections_.end() || !it->second.count(key))
            throw ConfigError("missing config key [" + section + "] " + key);
        return it->second.at(key);
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config key [" + section + "] " + key +
                              " is not a number: '" + v + "'");
        }
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long long get_int(const std::string& section, const std::string& key) const {
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            long long x = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config key [" + section + "] " + key +
                              " is not an integer: '" + v + "'");
        }
    }

    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        std::string v = get(section, key);
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw ConfigError("config key [" + section + "] " + key + " is not a boolean: '" + v + "'");
    }

    const std::map<std::string, Section>& sections() const { return sections_; }

    std::string serialize() const {
        std::ostringstream out;
        for (const auto& [name, sec] : sections_) {
            out << '[' << name << "]\n";
            for (const auto& [k, v] : sec) out << k << " = " << v << '\n';
            out << '\n';
        }
        return out.str();
    }

    std::uint64_t hash() const {
        const std::string s = serialize();
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

  private:
    std::map<std::string, Section> sections_;
};

}  // namespace rydsim
