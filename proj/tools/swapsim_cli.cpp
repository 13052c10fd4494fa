// Command line front end: run experiments, export plot data, and self-check.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "swapsim/swapsim.hpp"

namespace {

using namespace swapsim;

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SWAPSIM_OUT_DIR"); env && *env) return env;
    return ".";
}

std::filesystem::path resolve_summary_path(const std::string& arg) {
    std::filesystem::path p = arg;
    if (std::filesystem::is_directory(p)) p /= "summary.json";
    return p;
}

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_file, text);
        std::cout << "wrote " << out_file << "\n";
    }
}

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::string& out_flag, const std::optional<std::uint64_t>& seed,
            const std::string& mode_flag, const std::optional<std::uint64_t>& trials) {
    RunConfig cfg;
    EngineMode mode = EngineMode::MonteCarlo;
    if (!preset.empty()) cfg = preset_config(preset);
    if (!config_path.empty()) {
        const LoadedConfig loaded = load_config_file(config_path);
        cfg = loaded.config;
        if (loaded.manifest) mode = loaded.manifest->mode;
    }
    if (seed) cfg.experiment.seed = *seed;
    if (trials) cfg.experiment.trials = *trials;
    if (!mode_flag.empty()) {
        if (mode_flag == "analytic") mode = EngineMode::Analytic;
        else if (mode_flag == "montecarlo") mode = EngineMode::MonteCarlo;
        else throw std::invalid_argument("mode must be analytic or montecarlo");
    }
    cfg.experiment.validate();

    const std::filesystem::path out_dir = resolve_out_dir(out_flag);
    std::filesystem::create_directories(out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult result = run_experiment(cfg.experiment, mode);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (mode == EngineMode::MonteCarlo) {
        std::ofstream rec(out_dir / "records.txt", std::ios::binary);
        if (!rec) throw IoError("cannot open records file for writing");
        write_records(rec, result.records);
        std::cout << "wrote " << (out_dir / "records.txt").string() << "  ("
                  << result.records.size() << " trials)\n";
    }

    write_text_file(out_dir / "summary.json", summary_to_json(result.summary).dump(2) + "\n");
    std::cout << "wrote " << (out_dir / "summary.json").string() << "\n";

    RunManifest manifest;
    manifest.config_text = render_config(cfg);
    manifest.mode = mode;
    manifest.seed = cfg.experiment.seed;
    manifest.duration_seconds = duration;
    write_text_file(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
    std::cout << "wrote " << (out_dir / "manifest.json").string() << "\n";

    if (result.summary.fits_valid) {
        const VisibilityFit& f = result.summary.d1_fit;
        std::cout << "fitted visibility (minus subset): " << f.visibility << " +/- "
                  << f.se_visibility << "\n";
    }
    return 0;
}

int cmd_check(const std::string& config_path, std::uint64_t seed) {
    std::vector<CheckResult> results = run_self_checks(seed);

    if (!config_path.empty()) {
        const LoadedConfig loaded = load_config_file(config_path);
        CheckResult r;
        r.name = "configuration file parses and validates";
        r.passed = true;
        r.detail = config_path;
        results.push_back(r);
        if (!loaded.config.circuit.lines.empty()) {
            // Playground: one photon per mode named by the custom circuit,
            // pushed through it at the configured cutoff.
            CheckResult c;
            c.name = "custom circuit stays within cutoff and preserves norm";
            try {
                std::vector<ModeId> modes;
                const OpticalCircuit circuit = loaded.config.circuit.build();
                for (const CircuitElement& el : circuit.elements) {
                    const auto add = [&](const ModeId& m) {
                        if (std::find(modes.begin(), modes.end(), m) == modes.end())
                            modes.push_back(m);
                    };
                    if (std::holds_alternative<BeamSplitter>(el)) {
                        add(std::get<BeamSplitter>(el).in1);
                        add(std::get<BeamSplitter>(el).in2);
                    } else {
                        add(std::get<PhaseShifter>(el).mode);
                    }
                }
                FockState s = FockState::basis_state(
                    modes, std::vector<int>(modes.size(), 1), loaded.config.experiment.cutoff);
                s = apply_circuit(s, circuit);
                const double drift = std::abs(s.norm_squared() - 1.0);
                c.passed = drift < 1e-12;
                c.detail = std::to_string(s.term_count()) + " terms, norm drift " +
                           swapsim::detail::format_double(drift);
            } catch (const CutoffError& e) {
                c.passed = false;
                c.detail = e.what();
            }
            results.push_back(c);
        }
    }

    int failures = 0;
    for (const CheckResult& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail << "\n";
        if (!r.passed) ++failures;
    }
    std::cout << (failures == 0 ? "all checks passed" : "checks FAILED") << " ("
              << results.size() - failures << "/" << results.size() << ")\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mode-qubit entanglement-swapping simulator"};
    app.set_version_flag("--version", std::string(swapsim::kVersion));
    app.require_subcommand(1);

    std::string config_path, preset, out_flag, mode_flag, summary_arg, out_file;
    std::optional<std::uint64_t> seed_opt, trials_opt;
    std::uint64_t check_seed = 7;

    CLI::App* run = app.add_subcommand("run", "Run an experiment and write records/summary");
    run->add_option("--config", config_path, "Configuration file (or a run manifest)");
    run->add_option("--preset", preset, "Built-in parameter set: ideal, paper")
        ->check(CLI::IsMember({"ideal", "paper"}));
    run->add_option("--out", out_flag, "Output directory (default: $SWAPSIM_OUT_DIR or .)");
    run->add_option("--seed", seed_opt, "Override the random seed");
    run->add_option("--mode", mode_flag, "Engine: analytic or montecarlo")
        ->check(CLI::IsMember({"analytic", "montecarlo"}));
    run->add_option("--trials", trials_opt, "Override the trial count");

    CLI::App* fringe = app.add_subcommand("fringe", "Export fringe plot data from a summary");
    fringe->add_option("summary", summary_arg, "Summary file or run output directory")
        ->required();
    fringe->add_option("--out", out_file, "Write CSV here instead of stdout");

    CLI::App* hist = app.add_subcommand("histogram", "Export the phase-zero outcome table");
    hist->add_option("summary", summary_arg, "Summary file or run output directory")->required();
    hist->add_option("--out", out_file, "Write table here instead of stdout");

    CLI::App* check = app.add_subcommand("check", "Run the built-in invariant suite");
    check->add_option("--config", config_path, "Also validate this configuration file");
    check->add_option("--seed", check_seed, "Seed for the sampling checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, preset, out_flag, seed_opt, mode_flag, trials_opt);
        if (fringe->parsed()) {
            const auto path = resolve_summary_path(summary_arg);
            const auto summary =
                swapsim::summary_from_json(nlohmann::json::parse(swapsim::read_text_file(path)));
            emit(swapsim::fringe_csv(summary), out_file);
            return 0;
        }
        if (hist->parsed()) {
            const auto path = resolve_summary_path(summary_arg);
            const auto summary =
                swapsim::summary_from_json(nlohmann::json::parse(swapsim::read_text_file(path)));
            emit(swapsim::histogram_table(summary), out_file);
            return 0;
        }
        if (check->parsed()) return cmd_check(config_path, check_seed);
    } catch (const swapsim::CutoffError& e) {
        std::cerr << "error: occupation cutoff exceeded at " << e.element() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
