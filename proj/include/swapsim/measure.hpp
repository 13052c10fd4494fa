#pragma once

// Detection layer: threshold detectors, Bell states of mode-pair qubits, the
// partial Bell-state analyzer, the station coincidence analyzer, and the
// weak-field homodyne coincidence estimate.

#include <array>
#include <cstdint>

#include "swapsim/optics.hpp"

namespace swapsim {

enum class DetectorId { D1, D2, D1Star, D2Star };

inline const char* to_string(DetectorId id) {
    switch (id) {
        case DetectorId::D1: return "D1";
        case DetectorId::D2: return "D2";
        case DetectorId::D1Star: return "D1*";
        case DetectorId::D2Star: return "D2*";
    }
    return "?";
}

// Threshold (non photon-number-resolving) detector. A mode holding n photons
// clicks with probability 1 - (1-eta)^n, plus an optional dark-count chance
// that is independent of the light.
struct Detector {
    DetectorId id = DetectorId::D1;
    ModeId mode;
    double efficiency = 1.0;
    double dark_prob = 0.0;

    double click_probability(int photons) const {
        double miss = 1.0;
        for (int k = 0; k < photons; ++k) miss *= 1.0 - efficiency;
        return 1.0 - miss * (1.0 - dark_prob);
    }

    bool click(int photons, RandomStream& rng) const {
        return rng.bernoulli(click_probability(photons));
    }
};

// Result labels of the partial analyzer. The two single-click labels name
// which detector fired; the two-photon bunched events are counted apart
// because a linear analyzer cannot tell the remaining two Bell states apart.
enum class BellOutcome { PsiMinus, PsiPlus, PhiUndiscriminated, NoClick };

inline const char* to_string(BellOutcome o) {
    switch (o) {
        case BellOutcome::PsiMinus: return "psi_minus";
        case BellOutcome::PsiPlus: return "psi_plus";
        case BellOutcome::PhiUndiscriminated: return "phi_undiscriminated";
        case BellOutcome::NoClick: return "no_click";
    }
    return "?";
}

// The four Bell states of a mode pair, |0>/|1> being photon absence/presence:
//   phi_plus  = (|00> + |11>)/sqrt(2)    psi_plus  = (|01> + |10>)/sqrt(2)
//   phi_minus = (|00> - |11>)/sqrt(2)    psi_minus = (|01> - |10>)/sqrt(2)
struct BellStates {
    FockState phi_plus, phi_minus, psi_plus, psi_minus;
};

inline BellStates bell_states(const ModeId& first, const ModeId& second,
                              int cutoff = kDefaultCutoff) {
    const Complex h(kBalancedAmplitude, 0.0);
    std::vector<ModeId> modes{first, second};
    return {
        FockState::superposition(modes, {{{0, 0}, h}, {{1, 1}, h}}, cutoff),
        FockState::superposition(modes, {{{0, 0}, h}, {{1, 1}, -h}}, cutoff),
        FockState::superposition(modes, {{{0, 1}, h}, {{1, 0}, h}}, cutoff),
        FockState::superposition(modes, {{{0, 1}, h}, {{1, 0}, -h}}, cutoff),
    };
}

// Outcome probabilities for the analyzer photon pattern (n_phase_arm photons
// on the phase-arm output, n_other_arm on the other), index order
// [PsiMinus, PsiPlus, PhiUndiscriminated, NoClick]. D1 watches the other-arm
// output (where the minus state lands at zero phase), D2 the phase-arm output.
// A bunched pair is PhiUndiscriminated outright; a simultaneous one-one
// pattern cannot come out of a balanced splitter and flags an engine bug.
inline std::array<double, 4> eve_outcome_probabilities(int n_phase_arm, int n_other_arm,
                                                       const Detector& d1, const Detector& d2) {
    if (n_phase_arm == 1 && n_other_arm == 1)
        throw std::logic_error("coincident single photons behind a balanced analyzer splitter");
    if (n_phase_arm == 2 || n_other_arm == 2) return {0.0, 0.0, 1.0, 0.0};
    const double p1 = d1.click_probability(n_other_arm);
    const double p2 = d2.click_probability(n_phase_arm);
    // Simultaneous clicks (possible only through dark counts) are vetoed.
    return {p1 * (1.0 - p2), (1.0 - p1) * p2, 0.0, p1 * p2 + (1.0 - p1) * (1.0 - p2)};
}

// Station click probabilities for the pattern (n_a, n_b) after the station
// splitter, index order [none, D1* only, D2* only, both]. D1* watches the
// b-arm output, D2* the a-arm output.
inline std::array<double, 4> ab_click_probabilities(int n_a, int n_b, const Detector& d1s,
                                                    const Detector& d2s) {
    const double q1 = d1s.click_probability(n_b);
    const double q2 = d2s.click_probability(n_a);
    return {(1.0 - q1) * (1.0 - q2), q1 * (1.0 - q2), (1.0 - q1) * q2, q1 * q2};
}

// Partial Bell-state analyzer: a variable phase on one input arm, a balanced
// splitter, one threshold detector per output.
struct EveAnalyzer {
    ModeId phase_arm;  // arm carrying the variable phase
    ModeId other_arm;
    double phase = 0.0;
    Detector d1;  // watches the other-arm output
    Detector d2;  // watches the phase-arm output

    static EveAnalyzer standard(double phase, double efficiency, double dark_prob = 0.0) {
        EveAnalyzer an;
        an.phase_arm = ModeId("A'");
        an.other_arm = ModeId("B'");
        an.phase = phase;
        an.d1 = {DetectorId::D1, an.other_arm, efficiency, dark_prob};
        an.d2 = {DetectorId::D2, an.phase_arm, efficiency, dark_prob};
        return an;
    }
};

struct EveResult {
    BellOutcome outcome = BellOutcome::NoClick;
    std::vector<int> photon_pattern;  // (phase arm, other arm) after the splitter
    FockState collapsed;              // remaining modes
};

inline EveResult eve_analyze(const FockState& in, const EveAnalyzer& an, RandomStream& rng) {
    FockState s = apply_phase(in, PhaseShifter{an.phase_arm, an.phase});
    s = apply_bs(s, BeamSplitter{an.phase_arm, an.other_arm});
    MeasurementResult m = measure_modes(s, {an.phase_arm, an.other_arm}, rng);
    const int n_pa = m.outcome[0];
    const int n_oa = m.outcome[1];

    EveResult res;
    res.photon_pattern = m.outcome;
    res.collapsed = m.collapsed;
    if (n_pa == 1 && n_oa == 1)
        throw std::logic_error("coincident single photons behind a balanced analyzer splitter");
    if (n_pa == 2 || n_oa == 2) {
        res.outcome = BellOutcome::PhiUndiscriminated;
        return res;
    }
    const bool c1 = (n_oa > 0 || an.d1.dark_prob > 0.0) && an.d1.click(n_oa, rng);
    const bool c2 = (n_pa > 0 || an.d2.dark_prob > 0.0) && an.d2.click(n_pa, rng);
    if (c1 && c2)
        res.outcome = BellOutcome::NoClick;  // ambiguous double, only dark counts cause it
    else if (c1)
        res.outcome = BellOutcome::PsiMinus;
    else if (c2)
        res.outcome = BellOutcome::PsiPlus;
    else
        res.outcome = BellOutcome::NoClick;
    return res;
}

// Station coincidence analyzer: balanced splitter across the two station
// modes, one threshold detector per output.
struct AbAnalyzer {
    ModeId a_arm;
    ModeId b_arm;
    Detector d1star;  // watches the b-arm output
    Detector d2star;  // watches the a-arm output

    static AbAnalyzer standard(double efficiency, double dark_prob = 0.0) {
        AbAnalyzer an;
        an.a_arm = ModeId("A");
        an.b_arm = ModeId("B");
        an.d1star = {DetectorId::D1Star, an.b_arm, efficiency, dark_prob};
        an.d2star = {DetectorId::D2Star, an.a_arm, efficiency, dark_prob};
        return an;
    }
};

struct AbClicks {
    bool d1star = false;
    bool d2star = false;
};

struct AbResult {
    AbClicks clicks;
    std::vector<int> photon_pattern;  // (a arm, b arm) after the splitter
    FockState collapsed;              // remaining modes
};

inline AbResult ab_analyze(const FockState& in, const AbAnalyzer& an, RandomStream& rng) {
    FockState s = apply_bs(in, BeamSplitter{an.a_arm, an.b_arm});
    MeasurementResult m = measure_modes(s, {an.a_arm, an.b_arm}, rng);
    AbResult res;
    res.photon_pattern = m.outcome;
    res.collapsed = m.collapsed;
    res.clicks.d1star = (m.outcome[1] > 0 || an.d1star.dark_prob > 0.0) &&
                        an.d1star.click(m.outcome[1], rng);
    res.clicks.d2star = (m.outcome[0] > 0 || an.d2star.dark_prob > 0.0) &&
                        an.d2star.click(m.outcome[0], rng);
    return res;
}

// Conditional coincidence fringe (1 + v cos(phi)) / 2.
inline double fringe_probability(double phi, double visibility = 1.0) {
    return 0.5 * (1.0 + visibility * std::cos(phi));
}

// Weak-field homodyne coincidence intensity for equal local-oscillator
// magnitudes: |a|^2/4 * ( |a|^2 + 1 + cos(theta' - theta + phi) ).
// An unnormalized intensity, meaningful up to proportionality.
inline double homodyne_probability(double alpha_mag, double theta, double theta_prime,
                                   double phi) {
    const double a2 = alpha_mag * alpha_mag;
    return 0.25 * a2 * (a2 + (1.0 + std::cos(theta_prime - theta + phi)));
}

namespace detail {

// Final four-mode state of the heralded homodyne arrangement and its mode
// order (A out, Alice LO out, B out, Bob LO out). Alice's local oscillator
// carries alpha_prime, Bob's carries alpha; the measured coincidence pairs
// Alice's LO-side output with Bob's signal-side output.
inline FockState homodyne_final_state(Complex alpha, Complex alpha_prime, double phi) {
    const ModeId a("A"), ap("A'"), b("B"), bp("B'"), la("LA"), lb("LB");
    // Source pair split at the two station couplers.
    FockState pair = tensor(FockState::basis_state({a, ap}, {1, 0}),
                            FockState::basis_state({b, bp}, {1, 0}));
    FockState s = apply_bs(pair, BeamSplitter{a, ap});
    s = apply_bs(s, BeamSplitter{b, bp});
    // Analyzer arm with the variable phase, then herald on the minus-port
    // pattern (one photon on the other-arm output).
    s = apply_phase(s, PhaseShifter{ap, phi});
    s = apply_bs(s, BeamSplitter{ap, bp});
    FockState heralded = condition_on(s, {ap, bp}, {0, 1}).collapsed;
    // Local oscillators need headroom: one signal photon plus a two-photon
    // LO component can exit the same port.
    FockState full = tensor(tensor(heralded.with_cutoff(3), coherent_state(la, alpha_prime).with_cutoff(3)),
                            coherent_state(lb, alpha).with_cutoff(3));
    full = apply_bs(full, BeamSplitter{a, la});
    full = apply_bs(full, BeamSplitter{b, lb});
    return full;
}

}  // namespace detail

// Exact coincidence click probability of the heralded homodyne arrangement
// (threshold detectors at unit efficiency on Alice's LO-side output and Bob's
// signal-side output).
inline double homodyne_click_probability(Complex alpha, Complex alpha_prime, double phi) {
    const FockState full = detail::homodyne_final_state(alpha, alpha_prime, phi);
    const auto dist = born_distribution(
        full, {ModeId("A"), ModeId("LA"), ModeId("B"), ModeId("LB")});
    double p = 0.0;
    for (const auto& [pattern, w] : dist)
        if (pattern[1] >= 1 && pattern[2] >= 1) p += w;
    return p;
}

struct HomodyneResult {
    double rate = 0.0;
    double std_error = 0.0;
    std::uint64_t coincidences = 0;
    std::uint64_t trials = 0;
};

// Monte Carlo estimate of the same coincidence probability by sampling photon
// patterns of the final state.
inline HomodyneResult homodyne_simulate(Complex alpha, Complex alpha_prime, double phi,
                                        std::uint64_t trials, RandomStream& rng) {
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    const FockState full = detail::homodyne_final_state(alpha, alpha_prime, phi);
    const auto dist = born_distribution(
        full, {ModeId("A"), ModeId("LA"), ModeId("B"), ModeId("LB")});
    double total = 0.0;
    for (const auto& [o, w] : dist) total += w;

    HomodyneResult res;
    res.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const std::vector<int> pattern = detail::sample_distribution(dist, total, rng);
        if (pattern[1] >= 1 && pattern[2] >= 1) ++res.coincidences;
    }
    res.rate = static_cast<double>(res.coincidences) / static_cast<double>(trials);
    res.std_error = std::sqrt(res.rate * (1.0 - res.rate) / static_cast<double>(trials));
    return res;
}

}  // namespace swapsim
