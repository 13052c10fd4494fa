#pragma once

// Serialization: trial records as line-delimited text, summaries and run
// manifests as JSON documents, fringe scans as CSV plot data, and the
// discrimination histogram as a small table. Numeric fields round-trip
// exactly (printed with %.17g), so re-reading a records file reproduces the
// summary that produced it.

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "swapsim/config.hpp"
#include "swapsim/version.hpp"

namespace swapsim {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class RecordParseError : public std::runtime_error {
public:
    RecordParseError(int line, const std::string& what)
        : std::runtime_error("records line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline BellOutcome bell_outcome_from_string(const std::string& s, int line) {
    if (s == "psi_minus") return BellOutcome::PsiMinus;
    if (s == "psi_plus") return BellOutcome::PsiPlus;
    if (s == "phi_undiscriminated") return BellOutcome::PhiUndiscriminated;
    if (s == "no_click") return BellOutcome::NoClick;
    throw RecordParseError(line, "unknown analyzer outcome '" + s + "'");
}

inline MeasurementOrder order_from_string(const std::string& s, int line) {
    if (s == "eve_first") return MeasurementOrder::EveFirst;
    if (s == "ab_first") return MeasurementOrder::ABFirst;
    throw RecordParseError(line, "unknown measurement order '" + s + "'");
}

}  // namespace detail

inline constexpr const char* kRecordsHeader =
    "# trial_id phi eo_flip d1star d2star t_ab_ns eve_outcome t_eve_ns order";

inline void write_records(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kRecordsHeader << "\n";
    for (const TrialRecord& r : records) {
        out << r.trial_id << ' ' << detail::format_double(r.phi) << ' ' << (r.eo_flip ? 1 : 0)
            << ' ' << (r.ab.d1star ? 1 : 0) << ' ' << (r.ab.d2star ? 1 : 0) << ' '
            << detail::format_double(r.t_ab_ns) << ' ' << to_string(r.eve) << ' '
            << detail::format_double(r.t_eve_ns) << ' ' << to_string(r.order) << '\n';
    }
}

inline std::vector<TrialRecord> read_records(std::istream& in) {
    std::vector<TrialRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        std::istringstream row(trimmed);
        TrialRecord r;
        int eo = 0, c1 = 0, c2 = 0;
        std::string eve, order;
        if (!(row >> r.trial_id >> r.phi >> eo >> c1 >> c2 >> r.t_ab_ns >> eve >> r.t_eve_ns >>
              order))
            throw RecordParseError(line_no, "expected 9 fields");
        std::string extra;
        if (row >> extra) throw RecordParseError(line_no, "unexpected trailing field");
        r.eo_flip = eo != 0;
        r.ab.d1star = c1 != 0;
        r.ab.d2star = c2 != 0;
        r.eve = detail::bell_outcome_from_string(eve, line_no);
        r.order = detail::order_from_string(order, line_no);
        records.push_back(r);
    }
    return records;
}

// ---- JSON summary -----------------------------------------------------------

namespace detail {

inline nlohmann::json fit_to_json(const VisibilityFit& f) {
    return {{"offset", f.offset},         {"amplitude", f.amplitude},
            {"delta_rad", f.delta},       {"visibility", f.visibility},
            {"se_visibility", f.se_visibility}, {"se_delta", f.se_delta}};
}

inline VisibilityFit fit_from_json(const nlohmann::json& j) {
    VisibilityFit f;
    f.offset = j.at("offset").get<double>();
    f.amplitude = j.at("amplitude").get<double>();
    f.delta = j.at("delta_rad").get<double>();
    f.visibility = j.at("visibility").get<double>();
    f.se_visibility = j.at("se_visibility").get<double>();
    f.se_delta = j.at("se_delta").get<double>();
    return f;
}

}  // namespace detail

inline nlohmann::json summary_to_json(const FringeSummary& s) {
    nlohmann::json points = nlohmann::json::array();
    for (const PhasePoint& p : s.points) {
        points.push_back({{"phi", p.phi},
                          {"trials", p.trials},
                          {"d1star", p.d1star},
                          {"d2star", p.d2star},
                          {"eve_psi_minus", p.eve_psi_minus},
                          {"eve_psi_plus", p.eve_psi_plus},
                          {"eve_phi_undiscriminated", p.eve_phi_undisc},
                          {"eve_no_click", p.eve_no_click},
                          {"d1star_and_d1", p.d1star_d1},
                          {"d1star_and_d2", p.d1star_d2},
                          {"d2star_and_d1", p.d2star_d1},
                          {"d2star_and_d2", p.d2star_d2}});
    }
    nlohmann::json j = {{"format", "swapsim-summary"},
                        {"version", kVersion},
                        {"mode", to_string(s.mode)},
                        {"total_trials", s.total_trials},
                        {"seed", s.seed},
                        {"points", points},
                        {"fits_valid", s.fits_valid}};
    if (s.fits_valid) {
        j["fit_d1_subset"] = detail::fit_to_json(s.d1_fit);
        j["fit_d2_subset"] = detail::fit_to_json(s.d2_fit);
    }
    if (s.histogram_phi0) {
        const Histogram2x2& h = *s.histogram_phi0;
        j["histogram_phi0"] = {{"psi_minus", {h.count[0][0], h.count[0][1]}},
                               {"psi_plus", {h.count[1][0], h.count[1][1]}}};
    }
    return j;
}

inline FringeSummary summary_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "swapsim-summary")
        throw IoError("not a summary document (missing format tag)");
    FringeSummary s;
    const std::string mode = j.at("mode").get<std::string>();
    s.mode = mode == "analytic" ? EngineMode::Analytic : EngineMode::MonteCarlo;
    s.total_trials = j.at("total_trials").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& pj : j.at("points")) {
        PhasePoint p;
        p.phi = pj.at("phi").get<double>();
        p.trials = pj.at("trials").get<double>();
        p.d1star = pj.at("d1star").get<double>();
        p.d2star = pj.at("d2star").get<double>();
        p.eve_psi_minus = pj.at("eve_psi_minus").get<double>();
        p.eve_psi_plus = pj.at("eve_psi_plus").get<double>();
        p.eve_phi_undisc = pj.at("eve_phi_undiscriminated").get<double>();
        p.eve_no_click = pj.at("eve_no_click").get<double>();
        p.d1star_d1 = pj.at("d1star_and_d1").get<double>();
        p.d1star_d2 = pj.at("d1star_and_d2").get<double>();
        p.d2star_d1 = pj.at("d2star_and_d1").get<double>();
        p.d2star_d2 = pj.at("d2star_and_d2").get<double>();
        s.points.push_back(p);
    }
    s.fits_valid = j.value("fits_valid", false);
    if (s.fits_valid) {
        s.d1_fit = detail::fit_from_json(j.at("fit_d1_subset"));
        s.d2_fit = detail::fit_from_json(j.at("fit_d2_subset"));
    }
    if (j.contains("histogram_phi0")) {
        Histogram2x2 h;
        const auto& hj = j.at("histogram_phi0");
        h.count[0][0] = hj.at("psi_minus")[0].get<double>();
        h.count[0][1] = hj.at("psi_minus")[1].get<double>();
        h.count[1][0] = hj.at("psi_plus")[0].get<double>();
        h.count[1][1] = hj.at("psi_plus")[1].get<double>();
        s.histogram_phi0 = h;
    }
    return s;
}

// ---- run manifest -----------------------------------------------------------

struct RunManifest {
    std::string config_text;  // canonical configuration, see render_config
    EngineMode mode = EngineMode::MonteCarlo;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    double duration_seconds = 0.0;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    return {{"format", "swapsim-manifest"}, {"version", m.version},
            {"mode", to_string(m.mode)},    {"seed", m.seed},
            {"duration_seconds", m.duration_seconds}, {"config", m.config_text}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "swapsim-manifest")
        throw IoError("not a run manifest (missing format tag)");
    RunManifest m;
    m.config_text = j.at("config").get<std::string>();
    m.mode = j.at("mode").get<std::string>() == "analytic" ? EngineMode::Analytic
                                                           : EngineMode::MonteCarlo;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.value("version", "");
    m.duration_seconds = j.value("duration_seconds", 0.0);
    return m;
}

// ---- file helpers -----------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct LoadedConfig {
    RunConfig config;
    std::optional<RunManifest> manifest;  // present when the file was a manifest
};

// Accepts either the INI configuration dialect or a previously written run
// manifest (detected by a leading '{'); a manifest re-runs with its embedded
// canonical configuration.
inline LoadedConfig load_config_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::string head = detail::trim(text);
    LoadedConfig loaded;
    if (!head.empty() && head.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
        }
        loaded.manifest = manifest_from_json(j);
        loaded.config = parse_config(loaded.manifest->config_text);
    } else {
        loaded.config = parse_config(text);
    }
    return loaded;
}

// ---- plot-ready tables ------------------------------------------------------

// Fringe scan as CSV: scheduled phase, unconditioned station rate, and the
// station rate conditioned on each single-click analyzer subset, each rate
// followed by its own counting-statistics error column. Analytic summaries
// carry exact probabilities and zero errors. Empty subsets give rate 0,
// error 0.
inline std::string fringe_csv(const FringeSummary& s) {
    std::ostringstream out;
    out << "phi,unconditioned_rate,unconditioned_err,d1_subset_rate,d1_subset_err,"
           "d2_subset_rate,d2_subset_err\n";
    const bool analytic = s.mode == EngineMode::Analytic;
    auto rate_err = [&](double hits, double n) -> std::pair<double, double> {
        if (n <= 0.0) return {0.0, 0.0};
        const double r = hits / n;
        if (analytic) return {r, 0.0};
        return {r, std::sqrt(std::max(hits, 1.0)) / n};
    };
    for (const PhasePoint& p : s.points) {
        const auto [ru, eu] = rate_err(p.d1star, p.trials);
        const auto [r1, e1] = rate_err(p.d1star_d1, p.eve_psi_minus);
        const auto [r2, e2] = rate_err(p.d1star_d2, p.eve_psi_plus);
        out << detail::format_double(p.phi) << ',' << detail::format_double(ru) << ','
            << detail::format_double(eu) << ',' << detail::format_double(r1) << ','
            << detail::format_double(e1) << ',' << detail::format_double(r2) << ','
            << detail::format_double(e2) << '\n';
    }
    return out.str();
}

// 2x2 discrimination table at phase zero: analyzer outcome rows, station
// detector columns, counts with row fractions.
inline std::string histogram_table(const FringeSummary& s) {
    if (!s.histogram_phi0)
        throw IoError("summary holds no phase-zero point, histogram unavailable");
    const Histogram2x2& h = *s.histogram_phi0;
    std::ostringstream out;
    out << "outcome,d1star_count,d2star_count,d1star_fraction,d2star_fraction\n";
    const char* rows[2] = {"psi_minus", "psi_plus"};
    for (int r = 0; r < 2; ++r)
        out << rows[r] << ',' << detail::format_double(h.count[r][0]) << ','
            << detail::format_double(h.count[r][1]) << ','
            << detail::format_double(h.row_fraction(r, 0)) << ','
            << detail::format_double(h.row_fraction(r, 1)) << '\n';
    return out.str();
}

}  // namespace swapsim
