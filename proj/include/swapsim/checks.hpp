#pragma once

// Fast self-check suite behind the `check` subcommand: exercises the core
// physics invariants in analytic mode plus a short seeded sampling run.
// Every check is cheap enough to run on every invocation.

#include "swapsim/experiment.hpp"

namespace swapsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline void add_check(std::vector<CheckResult>& out, const std::string& name, bool ok,
                      const std::string& info) {
    out.push_back({name, ok, info});
}

}  // namespace detail

inline std::vector<CheckResult> run_self_checks(std::uint64_t seed = 7) {
    std::vector<CheckResult> out;
    std::ostringstream info;

    // Unitarity of the optical elements.
    {
        FockState s = prepare_source();
        const double n0 = s.norm_squared();
        FockState e = detail::evolve_through_analyzers(s, 0.7);
        const double n1 = e.norm_squared();
        detail::add_check(out, "circuit preserves norm", std::abs(n1 - n0) < 1e-12,
                          "norm drift " + detail::format_double(std::abs(n1 - n0)));
    }

    // Source overlap pattern with the four station/analyzer state products.
    {
        const BellStates ab = bell_states(kModeA, kModeB);
        const BellStates eve = bell_states(kModeAPrime, kModeBPrime);
        const FockState src = prepare_source();
        const auto overlap = [&](const FockState& x, const FockState& y) {
            FockState prod = tensor(x, y);
            // Reorder by rebuilding against the source mode order.
            std::complex<double> acc = 0.0;
            for (const auto& [ket, amp] : src.terms()) {
                std::vector<std::pair<ModeId, int>> pattern;
                for (std::size_t i = 0; i < src.modes().size(); ++i)
                    pattern.emplace_back(src.modes()[i], ket.occupation(i));
                acc += std::conj(prod.amplitude(pattern)) * amp;
            }
            return acc;
        };
        const double c1 = std::abs(overlap(ab.phi_plus, eve.phi_plus) - 0.5);
        const double c2 = std::abs(overlap(ab.phi_minus, eve.phi_minus) + 0.5);
        const double c3 = std::abs(overlap(ab.psi_plus, eve.psi_plus) + 0.5);
        const double c4 = std::abs(overlap(ab.psi_minus, eve.psi_minus) - 0.5);
        const double worst = std::max({c1, c2, c3, c4});
        detail::add_check(out, "source decomposes into matched state products", worst < 1e-12,
                          "worst coefficient error " + detail::format_double(worst));
    }

    ExperimentConfig cfg = ExperimentConfig::defaults();

    // Analytic fringe law on the minus subset.
    {
        double worst = 0.0;
        for (double phi : cfg.phase_schedule) {
            const JointDistribution d = analytic_joint_distribution(cfg, phi, cfg.order);
            const double joint = d[joint_index(BellOutcome::PsiMinus, 1)];
            const double cond = d[joint_index(BellOutcome::PsiMinus, 0)] + joint +
                                d[joint_index(BellOutcome::PsiMinus, 2)] +
                                d[joint_index(BellOutcome::PsiMinus, 3)];
            worst = std::max(worst, std::abs(joint / cond - fringe_probability(phi)));
        }
        detail::add_check(out, "conditional fringe follows (1+cos phi)/2", worst < 1e-12,
                          "worst deviation " + detail::format_double(worst));
    }

    // Station marginals do not depend on the analyzer phase.
    {
        const JointDistribution ref = analytic_joint_distribution(cfg, 0.0, cfg.order);
        double worst = 0.0;
        for (double phi : cfg.phase_schedule) {
            const JointDistribution d = analytic_joint_distribution(cfg, phi, cfg.order);
            for (int a = 0; a < 4; ++a) {
                double ma = 0.0, mr = 0.0;
                for (int e = 0; e < 4; ++e) {
                    ma += d[e * 4 + a];
                    mr += ref[e * 4 + a];
                }
                worst = std::max(worst, std::abs(ma - mr));
            }
        }
        detail::add_check(out, "station click marginals are phase independent", worst < 1e-12,
                          "worst marginal shift " + detail::format_double(worst));
    }

    // Measurement order cannot matter.
    {
        const OrderInvarianceReport rep = order_invariance_check(cfg, 1.1, 0);
        detail::add_check(out, "joint distribution independent of measurement order",
                          rep.analytic_bit_identical,
                          "max difference " + detail::format_double(rep.analytic_max_diff));
    }

    // Two-photon analyzer events never coincide with station clicks.
    {
        const JointDistribution d = analytic_joint_distribution(cfg, 0.9, cfg.order);
        const double leak = d[joint_index(BellOutcome::PhiUndiscriminated, 1)] +
                            d[joint_index(BellOutcome::PhiUndiscriminated, 2)] +
                            d[joint_index(BellOutcome::PhiUndiscriminated, 3)];
        detail::add_check(out, "two-photon analyzer events are station-silent", leak == 0.0,
                          "leaked probability " + detail::format_double(leak));
    }

    // Single-click analyzer efficiency is exactly one half at unit efficiency.
    {
        const JointDistribution d = analytic_joint_distribution(cfg, 0.4, cfg.order);
        double singles = 0.0;
        for (int a = 0; a < 4; ++a)
            singles += d[joint_index(BellOutcome::PsiMinus, a)] +
                       d[joint_index(BellOutcome::PsiPlus, a)];
        detail::add_check(out, "analyzer single-click efficiency is one half",
                          std::abs(singles - 0.5) < 1e-12,
                          "singles probability " + detail::format_double(singles));
    }

    // Seeded sampling is reproducible.
    {
        ExperimentConfig small = cfg;
        small.trials = 400;
        small.seed = seed;
        const ExperimentResult a = run_experiment(small);
        const ExperimentResult b = run_experiment(small);
        bool same = a.records.size() == b.records.size();
        if (same)
            for (std::size_t i = 0; i < a.records.size(); ++i) {
                const TrialRecord &x = a.records[i], &y = b.records[i];
                same = same && x.trial_id == y.trial_id && x.phi == y.phi &&
                       x.eo_flip == y.eo_flip && x.ab.d1star == y.ab.d1star &&
                       x.ab.d2star == y.ab.d2star && x.eve == y.eve && x.t_ab_ns == y.t_ab_ns &&
                       x.t_eve_ns == y.t_eve_ns && x.order == y.order;
            }
        detail::add_check(out, "identical seeds reproduce identical records", same,
                          same ? "400 trials bit-identical" : "records diverged");
    }

    // Sorting partitions the records and concatenation restores them.
    {
        ExperimentConfig small = cfg;
        small.trials = 300;
        small.seed = seed + 1;
        small.efficiency = 0.6;
        const ExperimentResult res = run_experiment(small);
        const auto subsets = victor_sort(res.records);
        std::size_t total = 0;
        bool consistent = true;
        for (const auto& [outcome, recs] : subsets) {
            total += recs.size();
            for (const TrialRecord& r : recs)
                consistent = consistent && r.effective_eve_outcome() == outcome;
        }
        detail::add_check(out, "outcome sorting partitions the record list",
                          consistent && total == res.records.size(),
                          std::to_string(subsets.size()) + " subsets, " + std::to_string(total) +
                              " records");
    }

    return out;
}

}  // namespace swapsim
