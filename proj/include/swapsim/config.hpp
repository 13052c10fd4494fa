#pragma once

// Plain-text configuration for the command line front end: a small INI
// dialect with [experiment], [phase], [optics], [measure], and [circuit]
// sections, plus a canonical renderer so a manifest can embed the exact
// configuration a run used.

#include <charconv>
#include <cstdio>
#include <sstream>

#include "swapsim/experiment.hpp"

namespace swapsim {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number for '" + key + "', got '" + text + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& text, int line, const std::string& key) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(line, "expected a non-negative integer for '" + key + "', got '" +
                                    text + "'");
    return value;
}

inline bool parse_bool(const std::string& text, int line, const std::string& key) {
    if (text == "true" || text == "on" || text == "1") return true;
    if (text == "false" || text == "off" || text == "0") return false;
    throw ConfigError(line, "expected true/false for '" + key + "', got '" + text + "'");
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// A parsed circuit element line, kept in source order for the `check`
// subcommand's custom-circuit playground.
struct CircuitSpec {
    std::vector<std::string> lines;  // canonical "bs M1 M2 t r" / "phase M x"

    OpticalCircuit build() const {
        OpticalCircuit c;
        for (const std::string& line : lines) {
            const auto tok = detail::split_ws(line);
            if (tok[0] == "bs") {
                const double t = tok.size() > 3 ? std::stod(tok[3]) : kBalancedAmplitude;
                const double r = tok.size() > 4 ? std::stod(tok[4]) : kBalancedAmplitude;
                c.elements.push_back(BeamSplitter{ModeId{tok[1]}, ModeId{tok[2]}, t, r});
            } else {
                c.elements.push_back(PhaseShifter{ModeId{tok[1]}, std::stod(tok[2])});
            }
        }
        return c;
    }
};

struct RunConfig {
    ExperimentConfig experiment = ExperimentConfig::defaults();
    CircuitSpec circuit;  // optional extra elements, used by `check`
};

// Parse the INI dialect. Unknown sections or keys are errors, with the line
// number reported.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    bool phase_set = false;
    bool have_displacements = false;
    std::vector<double> pending_displacements;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = detail::trim(line.substr(0, comment));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "phase" && section != "optics" &&
                section != "measure" && section != "circuit")
                throw ConfigError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");
        if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");

        ExperimentConfig& e = cfg.experiment;
        if (section == "experiment") {
            if (key == "trials") e.trials = detail::parse_u64(value, line_no, key);
            else if (key == "seed") e.seed = detail::parse_u64(value, line_no, key);
            else if (key == "order") {
                if (value == "eve_first") e.order = MeasurementOrder::EveFirst;
                else if (value == "ab_first") e.order = MeasurementOrder::ABFirst;
                else throw ConfigError(line_no, "order must be eve_first or ab_first");
            } else if (key == "delay_ns") e.delay_ns = detail::parse_double(value, line_no, key);
            else if (key == "eo_toggle") e.eo_toggle = detail::parse_bool(value, line_no, key);
            else if (key == "cutoff")
                e.cutoff = static_cast<int>(detail::parse_u64(value, line_no, key));
            else throw ConfigError(line_no, "unknown key '" + key + "' in [experiment]");
        } else if (section == "phase") {
            if (key == "points") {
                const auto n = detail::parse_u64(value, line_no, key);
                if (n < 2) throw ConfigError(line_no, "phase scan needs at least 2 points");
                e.phase_schedule.clear();
                for (std::uint64_t k = 0; k < n; ++k)
                    e.phase_schedule.push_back(2.0 * std::numbers::pi * static_cast<double>(k) /
                                               static_cast<double>(n - 1));
                phase_set = true;
            } else if (key == "schedule_rad") {
                e.phase_schedule.clear();
                for (const std::string& tok : detail::split_ws(value))
                    e.phase_schedule.push_back(detail::parse_double(tok, line_no, key));
                if (e.phase_schedule.empty())
                    throw ConfigError(line_no, "schedule_rad lists no phases");
                phase_set = true;
            } else if (key == "displacements_nm") {
                // Converted after parsing so a later [optics] wavelength is honored.
                pending_displacements.clear();
                for (const std::string& tok : detail::split_ws(value))
                    pending_displacements.push_back(detail::parse_double(tok, line_no, key));
                if (pending_displacements.empty())
                    throw ConfigError(line_no, "displacements_nm lists no positions");
                have_displacements = true;
                phase_set = true;
            } else throw ConfigError(line_no, "unknown key '" + key + "' in [phase]");
        } else if (section == "optics") {
            if (key == "wavelength_nm") {
                const double w = detail::parse_double(value, line_no, key);
                if (w <= 0.0) throw ConfigError(line_no, "wavelength must be positive");
                e.wavelength_nm = w;
            } else throw ConfigError(line_no, "unknown key '" + key + "' in [optics]");
        } else if (section == "measure") {
            if (key == "efficiency") e.efficiency = detail::parse_double(value, line_no, key);
            else if (key == "visibility") e.visibility = detail::parse_double(value, line_no, key);
            else if (key == "dark_count_prob")
                e.dark_prob = detail::parse_double(value, line_no, key);
            else throw ConfigError(line_no, "unknown key '" + key + "' in [measure]");
        } else if (section == "circuit") {
            if (key.rfind("element_", 0) != 0)
                throw ConfigError(line_no, "unknown key '" + key + "' in [circuit]");
            const auto tok = detail::split_ws(value);
            if (tok.empty()) throw ConfigError(line_no, "empty circuit element");
            if (tok[0] == "bs") {
                if (tok.size() != 3 && tok.size() != 5)
                    throw ConfigError(line_no, "bs takes 'bs MODE1 MODE2 [t r]'");
                double t = kBalancedAmplitude, r = kBalancedAmplitude;
                if (tok.size() == 5) {
                    t = detail::parse_double(tok[3], line_no, key);
                    r = detail::parse_double(tok[4], line_no, key);
                    if (std::abs(t * t + r * r - 1.0) > 1e-9)
                        throw ConfigError(line_no, "bs amplitudes must satisfy t^2 + r^2 = 1");
                }
                cfg.circuit.lines.push_back("bs " + tok[1] + " " + tok[2] + " " +
                                            detail::format_double(t) + " " +
                                            detail::format_double(r));
            } else if (tok[0] == "phase") {
                if (tok.size() != 3) throw ConfigError(line_no, "phase takes 'phase MODE RADIANS'");
                const double x = detail::parse_double(tok[2], line_no, key);
                cfg.circuit.lines.push_back("phase " + tok[1] + " " + detail::format_double(x));
            } else throw ConfigError(line_no, "unknown circuit element '" + tok[0] + "'");
        }
    }
    if (have_displacements) {
        cfg.experiment.phase_schedule.clear();
        for (double dx : pending_displacements)
            cfg.experiment.phase_schedule.push_back(
                mirror_phase(dx, cfg.experiment.wavelength_nm));
    }
    if (!phase_set && cfg.experiment.phase_schedule.empty())
        cfg.experiment.phase_schedule = ExperimentConfig::default_schedule();
    try {
        cfg.experiment.validate();
    } catch (const std::exception& e) {
        throw ConfigError(line_no, e.what());
    }
    return cfg;
}

// Canonical textual form: parsing its own output reproduces the same
// configuration, and it is what gets embedded in run manifests.
inline std::string render_config(const RunConfig& cfg) {
    const ExperimentConfig& e = cfg.experiment;
    std::ostringstream out;
    out << "[experiment]\n";
    out << "trials = " << e.trials << "\n";
    out << "seed = " << e.seed << "\n";
    out << "order = " << to_string(e.order) << "\n";
    out << "delay_ns = " << detail::format_double(e.delay_ns) << "\n";
    out << "eo_toggle = " << (e.eo_toggle ? "true" : "false") << "\n";
    out << "cutoff = " << e.cutoff << "\n";
    out << "\n[phase]\n";
    out << "schedule_rad =";
    for (double phi : e.phase_schedule) out << " " << detail::format_double(phi);
    out << "\n";
    out << "\n[optics]\n";
    out << "wavelength_nm = " << detail::format_double(e.wavelength_nm) << "\n";
    out << "\n[measure]\n";
    out << "efficiency = " << detail::format_double(e.efficiency) << "\n";
    out << "visibility = " << detail::format_double(e.visibility) << "\n";
    out << "dark_count_prob = " << detail::format_double(e.dark_prob) << "\n";
    if (!cfg.circuit.lines.empty()) {
        out << "\n[circuit]\n";
        for (std::size_t i = 0; i < cfg.circuit.lines.size(); ++i)
            out << "element_" << i << " = " << cfg.circuit.lines[i] << "\n";
    }
    return out.str();
}

inline RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    if (name == "ideal") {
        cfg.experiment = ExperimentConfig::defaults();
    } else if (name == "paper") {
        cfg.experiment = ExperimentConfig::preset_paper();
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (have: ideal, paper)");
    }
    return cfg;
}

}  // namespace swapsim
