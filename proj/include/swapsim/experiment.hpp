#pragma once

// Experiment orchestration: source preparation, seeded Monte Carlo trials,
// exact analytic outcome distributions, record sorting by analyzer outcome,
// fringe summaries, visibility fits, and the measurement-order check.

#include <algorithm>
#include <cstring>
#include <numbers>
#include <optional>

#include "swapsim/measure.hpp"

namespace swapsim {

enum class MeasurementOrder { EveFirst, ABFirst };

inline const char* to_string(MeasurementOrder o) {
    return o == MeasurementOrder::EveFirst ? "eve_first" : "ab_first";
}

enum class EngineMode { Analytic, MonteCarlo };

inline const char* to_string(EngineMode m) {
    return m == EngineMode::Analytic ? "analytic" : "montecarlo";
}

inline const ModeId kModeA{"A"};
inline const ModeId kModeAPrime{"A'"};
inline const ModeId kModeB{"B"};
inline const ModeId kModeBPrime{"B'"};

// Nominal repetition spacing of trials, bookkeeping only.
inline constexpr double kTrialPeriodNs = 1000.0;

struct ExperimentConfig {
    std::uint64_t trials = 100000;
    std::vector<double> phase_schedule;  // radians; empty selects the default scan
    double efficiency = 1.0;
    double visibility = 1.0;
    double dark_prob = 0.0;
    std::uint64_t seed = 1;
    MeasurementOrder order = MeasurementOrder::ABFirst;
    double delay_ns = 3.0;
    double wavelength_nm = 727.6;
    bool eo_toggle = false;
    int cutoff = kDefaultCutoff;

    // Thirteen equally spaced phases covering [0, 2pi].
    static std::vector<double> default_schedule() {
        std::vector<double> phis;
        for (int k = 0; k <= 12; ++k) phis.push_back(2.0 * std::numbers::pi * k / 12.0);
        return phis;
    }

    static ExperimentConfig defaults() {
        ExperimentConfig c;
        c.phase_schedule = default_schedule();
        return c;
    }

    // Hardware-flavored parameter set: detector efficiency 0.45, fringe
    // visibility 0.91, 727.6 nm operating wavelength, 20 ns analyzer delay.
    static ExperimentConfig preset_paper() {
        ExperimentConfig c = defaults();
        c.trials = 1000000;
        c.efficiency = 0.45;
        c.visibility = 0.91;
        c.wavelength_nm = 727.6;
        c.delay_ns = 20.0;
        c.seed = 42;
        return c;
    }

    void validate() const {
        if (phase_schedule.empty()) throw std::invalid_argument("phase schedule is empty");
        if (efficiency < 0.0 || efficiency > 1.0)
            throw std::invalid_argument("efficiency outside [0, 1]");
        if (visibility < 0.0 || visibility > 1.0)
            throw std::invalid_argument("visibility outside [0, 1]");
        if (dark_prob < 0.0 || dark_prob >= 1.0)
            throw std::invalid_argument("dark count probability outside [0, 1)");
        if (delay_ns <= 0.0) throw std::invalid_argument("delay must be positive");
        if (wavelength_nm <= 0.0) throw std::invalid_argument("wavelength must be positive");
        if (cutoff < 2) throw std::invalid_argument("cutoff below 2 cannot hold the photon pair");
    }
};

struct TrialRecord {
    std::uint64_t trial_id = 0;
    double phi = 0.0;     // scheduled analyzer phase
    bool eo_flip = false; // extra half-wave flip chosen after the station event
    AbClicks ab;
    double t_ab_ns = 0.0;
    BellOutcome eve = BellOutcome::NoClick;
    double t_eve_ns = 0.0;
    MeasurementOrder order = MeasurementOrder::ABFirst;

    // Outcome label corrected for the recorded flip: the flip interchanges
    // which single-click label the analyzer assigns.
    BellOutcome effective_eve_outcome() const {
        if (!eo_flip) return eve;
        if (eve == BellOutcome::PsiMinus) return BellOutcome::PsiPlus;
        if (eve == BellOutcome::PsiPlus) return BellOutcome::PsiMinus;
        return eve;
    }
};

// Photon pair fed through the two station couplers: the product of the two
// minus superpositions over (A, A') and (B, B').
inline FockState prepare_source(int cutoff = kDefaultCutoff) {
    FockState pair = tensor(FockState::basis_state({kModeA, kModeAPrime}, {1, 0}, cutoff),
                            FockState::basis_state({kModeB, kModeBPrime}, {1, 0}, cutoff));
    FockState s = apply_bs(pair, BeamSplitter{kModeA, kModeAPrime});
    return apply_bs(s, BeamSplitter{kModeB, kModeBPrime});
}

// ---- joint outcome bookkeeping -------------------------------------------

inline constexpr int kJointOutcomes = 16;
using JointDistribution = std::array<double, kJointOutcomes>;

inline int ab_click_index(const AbClicks& c) {
    return (c.d1star ? 1 : 0) + (c.d2star ? 2 : 0);
}

inline int joint_index(BellOutcome eve, int ab_idx) {
    return static_cast<int>(eve) * 4 + ab_idx;
}

inline int joint_index(BellOutcome eve, const AbClicks& ab) {
    return joint_index(eve, ab_click_index(ab));
}

// Interchange the two single-click rows, the analytic image of the half-wave
// flip relabeling.
inline JointDistribution swap_psi_rows(const JointDistribution& d) {
    JointDistribution out = d;
    for (int a = 0; a < 4; ++a) {
        out[joint_index(BellOutcome::PsiMinus, a)] = d[joint_index(BellOutcome::PsiPlus, a)];
        out[joint_index(BellOutcome::PsiPlus, a)] = d[joint_index(BellOutcome::PsiMinus, a)];
    }
    return out;
}

namespace detail {

using PatternKey = std::pair<std::vector<int>, std::vector<int>>;  // (analyzer, station)
using PatternWeights = std::map<PatternKey, double>;

// Squared-norm weights of the joint photon patterns, computed by two nested
// projective filterings in the given measurement order. Projection only
// selects kets, it never rescales them, and every weight is summed over the
// same kets in the same canonical order whichever projection came first, so
// the two orders agree bit for bit.
inline PatternWeights joint_pattern_weights(const FockState& evolved, MeasurementOrder order) {
    const std::vector<ModeId> eve_modes{kModeAPrime, kModeBPrime};
    const std::vector<ModeId> ab_modes{kModeA, kModeB};
    const auto& first = order == MeasurementOrder::EveFirst ? eve_modes : ab_modes;
    const auto& second = order == MeasurementOrder::EveFirst ? ab_modes : eve_modes;

    PatternWeights out;
    for (const auto& [o1, w1] : born_distribution(evolved, first)) {
        if (w1 <= 0.0) continue;
        const FockState branch = project_modes(evolved, first, o1).state;
        for (const auto& [o2, w2_hint] : born_distribution(branch, second)) {
            if (w2_hint <= 0.0) continue;
            const double w = project_modes(branch, second, o2).weight;
            const PatternKey key = order == MeasurementOrder::EveFirst ? PatternKey{o1, o2}
                                                                       : PatternKey{o2, o1};
            out[key] = w;
        }
    }
    return out;
}

// Fold photon-pattern weights through the detector response into the sixteen
// (analyzer outcome, station clicks) cells. Iteration over the canonical
// pattern map keeps the accumulation order fixed.
inline JointDistribution fold_detectors(const PatternWeights& weights, const EveAnalyzer& eve,
                                        const AbAnalyzer& ab) {
    JointDistribution dist{};
    for (const auto& [key, w] : weights) {
        const auto pe = eve_outcome_probabilities(key.first[0], key.first[1], eve.d1, eve.d2);
        const auto pa = ab_click_probabilities(key.second[0], key.second[1], ab.d1star, ab.d2star);
        for (int e = 0; e < 4; ++e)
            for (int a = 0; a < 4; ++a) dist[e * 4 + a] += w * pe[e] * pa[a];
    }
    return dist;
}

inline FockState evolve_through_analyzers(const FockState& source, double phi) {
    FockState s = apply_phase(source, PhaseShifter{kModeAPrime, phi});
    s = apply_bs(s, BeamSplitter{kModeAPrime, kModeBPrime});
    return apply_bs(s, BeamSplitter{kModeA, kModeB});
}

}  // namespace detail

// Exact joint distribution over (analyzer outcome, station click pattern) at
// one phase. Partial interference visibility v enters as the mixture
// v * coherent + (1-v) * phase-arm-number-dephased, which multiplies exactly
// the fringe cross terms by v and nothing else.
inline JointDistribution analytic_joint_distribution(const ExperimentConfig& cfg, double phi,
                                                     MeasurementOrder order) {
    const EveAnalyzer eve = EveAnalyzer::standard(phi, cfg.efficiency, cfg.dark_prob);
    const AbAnalyzer ab = AbAnalyzer::standard(cfg.efficiency, cfg.dark_prob);
    const FockState source = prepare_source(cfg.cutoff);

    JointDistribution coherent = detail::fold_detectors(
        detail::joint_pattern_weights(detail::evolve_through_analyzers(source, phi), order), eve,
        ab);
    if (cfg.visibility >= 1.0) return coherent;

    JointDistribution dephased{};
    for (int n = 0; n <= 1; ++n) {
        const auto branch = project_modes(source, {kModeAPrime}, {n});
        if (branch.weight <= 0.0) continue;
        // The branch stays unnormalized, so its fold carries its own weight.
        const JointDistribution d = detail::fold_detectors(
            detail::joint_pattern_weights(detail::evolve_through_analyzers(branch.state, phi),
                                          order),
            eve, ab);
        for (int i = 0; i < kJointOutcomes; ++i) dephased[i] += d[i];
    }
    JointDistribution out;
    for (int i = 0; i < kJointOutcomes; ++i)
        out[i] = cfg.visibility * coherent[i] + (1.0 - cfg.visibility) * dephased[i];
    return out;
}

// ---- Monte Carlo trials ----------------------------------------------------

// One seeded trial. Draw order is fixed: flip, dephasing choice, dephasing
// measurement, then the analyzers in the configured measurement order.
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial_id, double phi,
                             const FockState& source, RandomStream& rng) {
    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.phi = phi;
    rec.order = cfg.order;
    rec.t_ab_ns = static_cast<double>(trial_id) * kTrialPeriodNs;
    rec.t_eve_ns = cfg.order == MeasurementOrder::ABFirst ? rec.t_ab_ns + cfg.delay_ns
                                                          : rec.t_ab_ns - cfg.delay_ns;

    rec.eo_flip = cfg.eo_toggle && rng.bernoulli(0.5);

    FockState state = source;
    if (cfg.visibility < 1.0 && !rng.bernoulli(cfg.visibility)) {
        // Dephased branch: premeasure the phase-arm photon number, outcome
        // discarded. Erases the fringe cross term, touches nothing else.
        const auto dist = born_distribution(state, {kModeAPrime});
        double total = 0.0;
        for (const auto& [o, w] : dist) total += w;
        const auto outcome = detail::sample_distribution(dist, total, rng);
        state = project_modes(state, {kModeAPrime}, outcome).state.normalized();
    }
    if (rec.eo_flip) state = apply_parity_flip(state, kModeAPrime);

    EveAnalyzer eve = EveAnalyzer::standard(phi, cfg.efficiency, cfg.dark_prob);
    AbAnalyzer ab = AbAnalyzer::standard(cfg.efficiency, cfg.dark_prob);
    if (cfg.order == MeasurementOrder::EveFirst) {
        EveResult er = eve_analyze(state, eve, rng);
        rec.eve = er.outcome;
        AbResult ar = ab_analyze(er.collapsed, ab, rng);
        rec.ab = ar.clicks;
    } else {
        AbResult ar = ab_analyze(state, ab, rng);
        rec.ab = ar.clicks;
        EveResult er = eve_analyze(ar.collapsed, eve, rng);
        rec.eve = er.outcome;
    }
    if (rec.eve == BellOutcome::PhiUndiscriminated && cfg.dark_prob == 0.0 &&
        (rec.ab.d1star || rec.ab.d2star))
        throw std::logic_error("station click alongside a two-photon analyzer event");
    return rec;
}

// ---- summaries and fits ----------------------------------------------------

struct VisibilityFit {
    double offset = 0.0;     // fitted a in a + b cos(phi + delta)
    double amplitude = 0.0;  // fitted b
    double delta = 0.0;      // fitted phase offset
    double visibility = 0.0; // b / a
    double se_visibility = 0.0;
    double se_delta = 0.0;
};

class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// Weighted least squares of rate ~ a + b cos(phi + delta), linearized as
// a + p cos(phi) + q sin(phi). Standard errors come from the inverse normal
// matrix and the delta method.
inline VisibilityFit fit_visibility(const std::vector<double>& phi,
                                    const std::vector<double>& rate,
                                    const std::vector<double>& sigma) {
    if (phi.size() != rate.size() || phi.size() != sigma.size())
        throw std::invalid_argument("fit inputs differ in length");
    std::vector<double> distinct;
    for (double x : phi) {
        bool seen = false;
        for (double d : distinct)
            if (std::abs(d - x) < 1e-12) seen = true;
        if (!seen) distinct.push_back(x);
    }
    if (distinct.size() < 4)
        throw FitError("fit needs at least four distinct phases");
    const auto [mn, mx] = std::minmax_element(distinct.begin(), distinct.end());
    if (*mx - *mn < std::numbers::pi - 1e-9)
        throw FitError("fit needs phases spanning at least half a period");

    double m[3][3] = {};
    double v[3] = {};
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double w = sigma[k] > 0.0 ? 1.0 / (sigma[k] * sigma[k]) : 1.0;
        const double x[3] = {1.0, std::cos(phi[k]), std::sin(phi[k])};
        for (int i = 0; i < 3; ++i) {
            v[i] += w * x[i] * rate[k];
            for (int j = 0; j < 3; ++j) m[i][j] += w * x[i] * x[j];
        }
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-12) throw FitError("degenerate phase design");
    double inv[3][3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;

    const double a = inv[0][0] * v[0] + inv[0][1] * v[1] + inv[0][2] * v[2];
    const double p = inv[1][0] * v[0] + inv[1][1] * v[1] + inv[1][2] * v[2];
    const double q = inv[2][0] * v[0] + inv[2][1] * v[1] + inv[2][2] * v[2];

    VisibilityFit fit;
    fit.offset = a;
    fit.amplitude = std::hypot(p, q);
    fit.delta = std::atan2(-q, p);
    if (a <= 0.0) throw FitError("fitted offset is not positive, visibility undefined");
    fit.visibility = fit.amplitude / a;
    const double b = fit.amplitude;
    if (b > 0.0) {
        // gradients of V = hypot(p,q)/a and delta = atan2(-q, p)
        const double gv[3] = {-b / (a * a), p / (b * a), q / (b * a)};
        const double gd[3] = {0.0, q / (b * b), -p / (b * b)};
        double var_v = 0.0, var_d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                var_v += gv[i] * inv[i][j] * gv[j];
                var_d += gd[i] * inv[i][j] * gd[j];
            }
        fit.se_visibility = std::sqrt(std::max(var_v, 0.0));
        fit.se_delta = std::sqrt(std::max(var_d, 0.0));
    }
    return fit;
}

// Per-phase tallies. Monte Carlo summaries hold counts; analytic summaries
// hold exact per-trial probabilities in the same fields. Outcome columns use
// the flip-corrected label.
struct PhasePoint {
    double phi = 0.0;
    double trials = 0.0;
    double d1star = 0.0;  // unconditioned station clicks
    double d2star = 0.0;
    double eve_psi_minus = 0.0;
    double eve_psi_plus = 0.0;
    double eve_phi_undisc = 0.0;
    double eve_no_click = 0.0;
    double d1star_d1 = 0.0;  // station click joint with analyzer outcome
    double d1star_d2 = 0.0;
    double d2star_d1 = 0.0;
    double d2star_d2 = 0.0;
};

struct Histogram2x2 {
    // rows: analyzer minus/plus outcome; columns: D1*, D2*
    double count[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double row_fraction(int row, int col) const {
        const double total = count[row][0] + count[row][1];
        return total > 0.0 ? count[row][col] / total : 0.0;
    }
};

struct FringeSummary {
    EngineMode mode = EngineMode::MonteCarlo;
    std::uint64_t total_trials = 0;
    std::uint64_t seed = 0;
    std::vector<PhasePoint> points;
    bool fits_valid = false;
    VisibilityFit d1_fit;  // rate of D1* among trials with the minus outcome
    VisibilityFit d2_fit;  // rate of D1* among trials with the plus outcome
    std::optional<Histogram2x2> histogram_phi0;
};

namespace detail {

inline void accumulate(PhasePoint& pt, BellOutcome eve, const AbClicks& ab, double w) {
    pt.trials += w;
    if (ab.d1star) pt.d1star += w;
    if (ab.d2star) pt.d2star += w;
    switch (eve) {
        case BellOutcome::PsiMinus:
            pt.eve_psi_minus += w;
            if (ab.d1star) pt.d1star_d1 += w;
            if (ab.d2star) pt.d2star_d1 += w;
            break;
        case BellOutcome::PsiPlus:
            pt.eve_psi_plus += w;
            if (ab.d1star) pt.d1star_d2 += w;
            if (ab.d2star) pt.d2star_d2 += w;
            break;
        case BellOutcome::PhiUndiscriminated: pt.eve_phi_undisc += w; break;
        case BellOutcome::NoClick: pt.eve_no_click += w; break;
    }
}

inline void finish_summary(FringeSummary& s) {
    std::vector<double> phis, r1, s1, r2, s2;
    for (const PhasePoint& pt : s.points) {
        phis.push_back(pt.phi);
        const bool analytic = s.mode == EngineMode::Analytic;
        auto rate_sigma = [&](double hits, double n) -> std::pair<double, double> {
            if (n <= 0.0) return {0.0, analytic ? 1.0 : 0.0};
            const double r = hits / n;
            if (analytic) return {r, 1.0};
            return {r, std::sqrt(std::max(r * (1.0 - r), 1.0 / n) / n)};
        };
        auto [a, sa] = rate_sigma(pt.d1star_d1, pt.eve_psi_minus);
        auto [b, sb] = rate_sigma(pt.d1star_d2, pt.eve_psi_plus);
        r1.push_back(a);
        s1.push_back(sa == 0.0 ? 1.0 : sa);
        r2.push_back(b);
        s2.push_back(sb == 0.0 ? 1.0 : sb);
    }
    try {
        s.d1_fit = fit_visibility(phis, r1, s1);
        s.d2_fit = fit_visibility(phis, r2, s2);
        s.fits_valid = true;
    } catch (const FitError&) {
        s.fits_valid = false;
    }
    for (const PhasePoint& pt : s.points) {
        if (pt.phi == 0.0) {
            Histogram2x2 h;
            h.count[0][0] = pt.d1star_d1;
            h.count[0][1] = pt.d2star_d1;
            h.count[1][0] = pt.d1star_d2;
            h.count[1][1] = pt.d2star_d2;
            s.histogram_phi0 = h;
            break;
        }
    }
}

}  // namespace detail

// Rebuild the per-phase tallies from records, grouping by the recorded phase
// in order of first appearance. This is the same routine the Monte Carlo
// engine uses, so a faithful records file reproduces its summary exactly.
inline FringeSummary summarize_records(const std::vector<TrialRecord>& records,
                                       std::uint64_t seed = 0) {
    FringeSummary s;
    s.mode = EngineMode::MonteCarlo;
    s.seed = seed;
    s.total_trials = records.size();
    for (const TrialRecord& rec : records) {
        PhasePoint* pt = nullptr;
        for (PhasePoint& p : s.points)
            if (p.phi == rec.phi) {
                pt = &p;
                break;
            }
        if (!pt) {
            s.points.emplace_back();
            pt = &s.points.back();
            pt->phi = rec.phi;
        }
        detail::accumulate(*pt, rec.effective_eve_outcome(), rec.ab, 1.0);
    }
    detail::finish_summary(s);
    return s;
}

struct ExperimentResult {
    std::vector<TrialRecord> records;  // empty in analytic mode
    FringeSummary summary;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       EngineMode mode = EngineMode::MonteCarlo) {
    cfg.validate();
    ExperimentResult result;

    if (mode == EngineMode::Analytic) {
        FringeSummary s;
        s.mode = EngineMode::Analytic;
        s.seed = cfg.seed;
        s.total_trials = 0;
        for (double phi : cfg.phase_schedule) {
            const JointDistribution d = analytic_joint_distribution(cfg, phi, cfg.order);
            PhasePoint pt;
            pt.phi = phi;
            for (int e = 0; e < 4; ++e)
                for (int a = 0; a < 4; ++a) {
                    AbClicks ab{(a & 1) != 0, (a & 2) != 0};
                    detail::accumulate(pt, static_cast<BellOutcome>(e), ab, d[e * 4 + a]);
                }
            s.points.push_back(pt);
        }
        detail::finish_summary(s);
        result.summary = s;
        return result;
    }

    const FockState source = prepare_source(cfg.cutoff);
    const RandomStream master(cfg.seed);
    const std::size_t n_phases = cfg.phase_schedule.size();
    const std::uint64_t base = cfg.trials / n_phases;
    const std::uint64_t rem = cfg.trials % n_phases;

    result.records.reserve(cfg.trials);
    std::uint64_t trial_id = 0;
    for (std::size_t k = 0; k < n_phases; ++k) {
        const std::uint64_t block = base + (k < rem ? 1 : 0);
        for (std::uint64_t i = 0; i < block; ++i, ++trial_id) {
            RandomStream rng = master.substream(trial_id);
            result.records.push_back(
                run_trial(cfg, trial_id, cfg.phase_schedule[k], source, rng));
        }
    }
    result.summary = summarize_records(result.records, cfg.seed);
    result.summary.total_trials = cfg.trials;
    return result;
}

// Partition records by the flip-corrected analyzer outcome. Pure bookkeeping
// on classical record data; concatenating the subsets restores the original
// multiset.
inline std::map<BellOutcome, std::vector<TrialRecord>> victor_sort(
    const std::vector<TrialRecord>& records) {
    std::map<BellOutcome, std::vector<TrialRecord>> subsets;
    for (const TrialRecord& rec : records) subsets[rec.effective_eve_outcome()].push_back(rec);
    return subsets;
}

// ---- measurement-order invariance ------------------------------------------

struct OrderInvarianceReport {
    bool analytic_bit_identical = false;
    double analytic_max_diff = 0.0;
    double mc_tvd = 0.0;
    double mc_threshold = 0.0;
    bool mc_pass = false;
    std::uint64_t mc_trials = 0;
};

// Analytic: the joint distribution must come out bit-identical whichever
// analyzer is measured first, at every scheduled phase. Monte Carlo: total
// variation distance between empirical joints at `mc_phi`, bounded by
// 5 sqrt(K/N) with K = 16 outcome cells.
inline OrderInvarianceReport order_invariance_check(const ExperimentConfig& cfg, double mc_phi,
                                                    std::uint64_t mc_trials) {
    OrderInvarianceReport rep;
    rep.analytic_bit_identical = true;
    for (double phi : cfg.phase_schedule) {
        const JointDistribution de = analytic_joint_distribution(cfg, phi, MeasurementOrder::EveFirst);
        const JointDistribution da = analytic_joint_distribution(cfg, phi, MeasurementOrder::ABFirst);
        if (std::memcmp(de.data(), da.data(), sizeof(double) * kJointOutcomes) != 0)
            rep.analytic_bit_identical = false;
        for (int i = 0; i < kJointOutcomes; ++i)
            rep.analytic_max_diff = std::max(rep.analytic_max_diff, std::abs(de[i] - da[i]));
    }

    rep.mc_trials = mc_trials;
    if (mc_trials > 0) {
        auto empirical = [&](MeasurementOrder order) {
            ExperimentConfig c = cfg;
            c.order = order;
            c.phase_schedule = {mc_phi};
            c.trials = mc_trials;
            JointDistribution d{};
            const ExperimentResult res = run_experiment(c, EngineMode::MonteCarlo);
            for (const TrialRecord& rec : res.records)
                d[joint_index(rec.effective_eve_outcome(), rec.ab)] += 1.0;
            for (double& x : d) x /= static_cast<double>(mc_trials);
            return d;
        };
        const JointDistribution de = empirical(MeasurementOrder::EveFirst);
        const JointDistribution da = empirical(MeasurementOrder::ABFirst);
        double tvd = 0.0;
        for (int i = 0; i < kJointOutcomes; ++i) tvd += std::abs(de[i] - da[i]);
        rep.mc_tvd = 0.5 * tvd;
        rep.mc_threshold =
            5.0 * std::sqrt(static_cast<double>(kJointOutcomes) / static_cast<double>(mc_trials));
        rep.mc_pass = rep.mc_tvd < rep.mc_threshold;
    }
    return rep;
}

}  // namespace swapsim
