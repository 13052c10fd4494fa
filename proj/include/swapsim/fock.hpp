#pragma once

// Sparse Fock-space statevector over a small set of named optical modes.
// States are immutable values; every operation returns a new state. Amplitude
// maps are std::map keyed by occupation kets, so iteration order (and with it
// every accumulated sum) is canonical and reproducible bit for bit.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swapsim {

using Complex = std::complex<double>;

inline constexpr int kMaxModes = 12;
inline constexpr int kDefaultCutoff = 2;
inline constexpr double kAmplitudeTolerance = 1e-12;
inline constexpr double kPruneThreshold = 1e-15;

// Name of one optical mode. Comparison is by label.
class ModeId {
public:
    ModeId() = default;
    ModeId(std::string label) : label_(std::move(label)) {}
    ModeId(const char* label) : label_(label) {}

    const std::string& label() const { return label_; }

    friend bool operator==(const ModeId& a, const ModeId& b) { return a.label_ == b.label_; }
    friend bool operator!=(const ModeId& a, const ModeId& b) { return a.label_ != b.label_; }
    friend bool operator<(const ModeId& a, const ModeId& b) { return a.label_ < b.label_; }

private:
    std::string label_;
};

// Occupation-number ket, aligned to the owning state's mode order.
// Slots at index >= width stay zero so default comparisons are consistent.
struct BasisKet {
    std::array<std::uint8_t, kMaxModes> occ{};
    std::uint8_t width = 0;

    int occupation(std::size_t mode_index) const { return occ[mode_index]; }

    int total() const {
        int s = 0;
        for (std::size_t i = 0; i < width; ++i) s += occ[i];
        return s;
    }

    friend auto operator<=>(const BasisKet&, const BasisKet&) = default;
};

class CutoffError : public std::runtime_error {
public:
    CutoffError(const std::string& element, int occupation, int cutoff)
        : std::runtime_error("occupation cutoff exceeded at " + element + ": occupation " +
                             std::to_string(occupation) + " > cutoff " + std::to_string(cutoff)),
          element_(element) {}

    const std::string& element() const { return element_; }

private:
    std::string element_;
};

// Deterministic seeded generator. Substreams are derived from (seed, index),
// so per-trial streams are reproducible and independent of execution order.
// The uniform mapping is the 53-bit one, spelled out rather than delegated to
// std::uniform_real_distribution, which the standard leaves implementation
// defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        gen_.seed(seq);
    }

    std::uint64_t raw() { return gen_(); }

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Stream for one trial; index 0 is reserved for the master stream itself.
    RandomStream substream(std::uint64_t index) const { return RandomStream(seed_, index + 1); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 gen_;
};

class FockState {
public:
    // Scalar unit state (no modes, amplitude 1 on the empty ket).
    FockState() { amps_[BasisKet{}] = Complex(1.0, 0.0); }

    static FockState vacuum(std::vector<ModeId> modes, int cutoff = kDefaultCutoff) {
        FockState s(std::move(modes), cutoff);
        BasisKet ket;
        ket.width = static_cast<std::uint8_t>(s.modes_.size());
        s.amps_[ket] = Complex(1.0, 0.0);
        return s;
    }

    static FockState basis_state(std::vector<ModeId> modes, const std::vector<int>& occupations,
                                 int cutoff = kDefaultCutoff) {
        FockState s(std::move(modes), cutoff);
        s.amps_[s.make_ket(occupations)] = Complex(1.0, 0.0);
        return s;
    }

    // Builds exactly the given superposition; does not normalize.
    static FockState superposition(std::vector<ModeId> modes,
                                   const std::vector<std::pair<std::vector<int>, Complex>>& terms,
                                   int cutoff = kDefaultCutoff) {
        FockState s(std::move(modes), cutoff);
        for (const auto& [occ, amp] : terms) s.amps_[s.make_ket(occ)] += amp;
        s.prune_in_place();
        return s;
    }

    const std::vector<ModeId>& modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    const std::map<BasisKet, Complex>& terms() const { return amps_; }
    std::size_t term_count() const { return amps_.size(); }

    bool has_mode(const ModeId& m) const {
        for (const ModeId& x : modes_)
            if (x == m) return true;
        return false;
    }

    std::size_t mode_index(const ModeId& m) const {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            if (modes_[i] == m) return i;
        throw std::invalid_argument("no mode named '" + m.label() + "' in this state");
    }

    Complex amplitude(const BasisKet& ket) const {
        auto it = amps_.find(ket);
        return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
    }

    // Occupations listed by mode name; unlisted modes are taken as empty.
    Complex amplitude(const std::vector<std::pair<ModeId, int>>& occupations) const {
        BasisKet ket;
        ket.width = static_cast<std::uint8_t>(modes_.size());
        for (const auto& [m, n] : occupations) ket.occ[mode_index(m)] = check_occ(n);
        return amplitude(ket);
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [ket, amp] : amps_) s += std::norm(amp);
        return s;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    FockState normalized() const {
        double n2 = norm_squared();
        if (n2 <= 0.0) throw std::domain_error("cannot normalize a zero state");
        FockState out = *this;
        double inv = 1.0 / std::sqrt(n2);
        for (auto& [ket, amp] : out.amps_) amp *= inv;
        return out;
    }

    // Copy with a different occupation bound. Raising it is always allowed;
    // lowering it must not cut under existing terms.
    FockState with_cutoff(int cutoff) const {
        if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
        for (const auto& [ket, amp] : amps_)
            for (std::size_t i = 0; i < modes_.size(); ++i)
                if (ket.occupation(i) > cutoff)
                    throw CutoffError("mode '" + modes_[i].label() + "'", ket.occupation(i), cutoff);
        FockState out = *this;
        out.cutoff_ = cutoff;
        return out;
    }

    // Internal builder used by the operations below. The ket widths and
    // occupations must already satisfy the state invariants.
    static FockState from_terms(std::vector<ModeId> modes, int cutoff,
                                std::map<BasisKet, Complex> amps) {
        FockState s(std::move(modes), cutoff);
        s.amps_ = std::move(amps);
        s.prune_in_place();
        return s;
    }

private:
    FockState(std::vector<ModeId> modes, int cutoff) : modes_(std::move(modes)), cutoff_(cutoff) {
        if (modes_.size() > kMaxModes)
            throw std::invalid_argument("mode count " + std::to_string(modes_.size()) +
                                        " exceeds the supported maximum of " +
                                        std::to_string(kMaxModes));
        if (cutoff_ < 0) throw std::invalid_argument("cutoff must be nonnegative");
        for (std::size_t i = 0; i < modes_.size(); ++i)
            for (std::size_t j = i + 1; j < modes_.size(); ++j)
                if (modes_[i] == modes_[j])
                    throw std::invalid_argument("duplicate mode '" + modes_[i].label() + "'");
    }

    std::uint8_t check_occ(int n) const {
        if (n < 0 || n > cutoff_)
            throw std::invalid_argument("occupation " + std::to_string(n) +
                                        " outside [0, " + std::to_string(cutoff_) + "]");
        return static_cast<std::uint8_t>(n);
    }

    BasisKet make_ket(const std::vector<int>& occupations) const {
        if (occupations.size() != modes_.size())
            throw std::invalid_argument("expected " + std::to_string(modes_.size()) +
                                        " occupations, got " + std::to_string(occupations.size()));
        BasisKet ket;
        ket.width = static_cast<std::uint8_t>(modes_.size());
        for (std::size_t i = 0; i < occupations.size(); ++i)
            ket.occ[i] = check_occ(occupations[i]);
        return ket;
    }

    void prune_in_place() {
        for (auto it = amps_.begin(); it != amps_.end();)
            it = std::abs(it->second) < kPruneThreshold ? amps_.erase(it) : std::next(it);
    }

    std::vector<ModeId> modes_;
    int cutoff_ = kDefaultCutoff;
    std::map<BasisKet, Complex> amps_;
};

// Product state over the concatenated mode lists. Mode sets must be disjoint.
inline FockState tensor(const FockState& a, const FockState& b) {
    std::vector<ModeId> modes = a.modes();
    for (const ModeId& m : b.modes()) {
        if (a.has_mode(m))
            throw std::invalid_argument("tensor operands share mode '" + m.label() + "'");
        modes.push_back(m);
    }
    if (modes.size() > kMaxModes)
        throw std::invalid_argument("tensor result exceeds the supported mode count");
    std::map<BasisKet, Complex> amps;
    for (const auto& [ka, va] : a.terms()) {
        for (const auto& [kb, vb] : b.terms()) {
            BasisKet ket;
            ket.width = static_cast<std::uint8_t>(modes.size());
            for (std::size_t i = 0; i < a.modes().size(); ++i) ket.occ[i] = ka.occ[i];
            for (std::size_t i = 0; i < b.modes().size(); ++i)
                ket.occ[a.modes().size() + i] = kb.occ[i];
            amps[ket] += va * vb;
        }
    }
    return FockState::from_terms(std::move(modes), std::max(a.cutoff(), b.cutoff()),
                                 std::move(amps));
}

// <bra|ket>. Requires identical mode lists (same names, same order).
inline Complex inner_product(const FockState& bra, const FockState& ket) {
    if (bra.modes().size() != ket.modes().size())
        throw std::invalid_argument("inner product over mismatched mode sets");
    for (std::size_t i = 0; i < bra.modes().size(); ++i)
        if (!(bra.modes()[i] == ket.modes()[i]))
            throw std::invalid_argument("inner product over mismatched mode sets");
    const auto& small = bra.term_count() <= ket.term_count() ? bra : ket;
    const auto& large = bra.term_count() <= ket.term_count() ? ket : bra;
    const bool small_is_bra = &small == &bra;
    Complex s(0.0, 0.0);
    for (const auto& [k, v] : small.terms()) {
        Complex other = large.amplitude(k);
        s += small_is_bra ? std::conj(v) * other : std::conj(other) * v;
    }
    return s;
}

namespace detail {

inline std::vector<std::size_t> resolve_modes(const FockState& s, const std::vector<ModeId>& modes) {
    if (modes.empty()) throw std::invalid_argument("empty mode list");
    std::vector<std::size_t> idx;
    idx.reserve(modes.size());
    for (const ModeId& m : modes) idx.push_back(s.mode_index(m));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            if (idx[i] == idx[j])
                throw std::invalid_argument("mode '" + modes[i].label() + "' listed twice");
    return idx;
}

}  // namespace detail

// Photon-number weights over a subset of modes, keyed by the occupations in
// the requested mode order. For a normalized state these are probabilities.
inline std::map<std::vector<int>, double> born_distribution(const FockState& s,
                                                            const std::vector<ModeId>& modes) {
    const auto idx = detail::resolve_modes(s, modes);
    std::map<std::vector<int>, double> dist;
    for (const auto& [ket, amp] : s.terms()) {
        std::vector<int> key;
        key.reserve(idx.size());
        for (std::size_t i : idx) key.push_back(ket.occupation(i));
        dist[key] += std::norm(amp);
    }
    return dist;
}

struct ProjectionResult {
    double weight = 0.0;  // squared norm of the kept component
    FockState state;      // unnormalized, every mode retained
};

// Keeps only the kets whose occupations on `modes` equal `outcome`. No
// arithmetic touches the surviving amplitudes, so repeated projections commute
// exactly, including at the floating-point level.
inline ProjectionResult project_modes(const FockState& s, const std::vector<ModeId>& modes,
                                      const std::vector<int>& outcome) {
    const auto idx = detail::resolve_modes(s, modes);
    if (outcome.size() != idx.size())
        throw std::invalid_argument("outcome length does not match the mode list");
    std::map<BasisKet, Complex> kept;
    double weight = 0.0;
    for (const auto& [ket, amp] : s.terms()) {
        bool match = true;
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (ket.occupation(idx[k]) != outcome[k]) {
                match = false;
                break;
            }
        if (!match) continue;
        kept.emplace(ket, amp);
        weight += std::norm(amp);
    }
    return {weight, FockState::from_terms(s.modes(), s.cutoff(), std::move(kept))};
}

struct MeasurementResult {
    std::vector<int> outcome;  // occupations in the requested mode order
    double probability = 0.0;
    FockState collapsed;  // renormalized state over the remaining modes
};

namespace detail {

// Drops modes whose occupation is pinned by a projection, renormalizes.
inline FockState drop_modes_and_normalize(const FockState& s,
                                          const std::vector<std::size_t>& drop, double weight) {
    std::vector<ModeId> rest;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.modes().size(); ++i) {
        bool dropped = false;
        for (std::size_t d : drop)
            if (d == i) {
                dropped = true;
                break;
            }
        if (!dropped) {
            keep.push_back(i);
            rest.push_back(s.modes()[i]);
        }
    }
    const double inv = 1.0 / std::sqrt(weight);
    std::map<BasisKet, Complex> amps;
    for (const auto& [ket, amp] : s.terms()) {
        BasisKet nk;
        nk.width = static_cast<std::uint8_t>(keep.size());
        for (std::size_t k = 0; k < keep.size(); ++k) nk.occ[k] = ket.occ[keep[k]];
        amps[nk] += amp * inv;
    }
    return FockState::from_terms(std::move(rest), s.cutoff(), std::move(amps));
}

// Walk the cumulative distribution in canonical key order.
inline std::vector<int> sample_distribution(const std::map<std::vector<int>, double>& dist,
                                            double total, RandomStream& rng) {
    const double u = rng.uniform() * total;
    double cdf = 0.0;
    const std::vector<int>* last = nullptr;
    for (const auto& [outcome, w] : dist) {
        if (w <= 0.0) continue;
        cdf += w;
        last = &outcome;
        if (u < cdf) return outcome;
    }
    if (!last) throw std::domain_error("cannot sample from an empty distribution");
    return *last;  // u landed in the rounding slack at the top of the cdf
}

}  // namespace detail

// Born-rule measurement of the photon numbers on `modes`. The measured modes
// are consumed; the collapsed state describes what remains (a scalar state if
// everything was measured).
inline MeasurementResult measure_modes(const FockState& s, const std::vector<ModeId>& modes,
                                       RandomStream& rng) {
    const auto dist = born_distribution(s, modes);
    double total = 0.0;
    for (const auto& [o, w] : dist) total += w;
    if (total <= 0.0) throw std::domain_error("measurement on a zero state");
    const std::vector<int> outcome = detail::sample_distribution(dist, total, rng);
    auto proj = project_modes(s, modes, outcome);
    return {outcome, proj.weight / total,
            detail::drop_modes_and_normalize(proj.state, detail::resolve_modes(s, modes),
                                             proj.weight)};
}

// Deterministic counterpart of measure_modes: conditions on a given outcome.
inline MeasurementResult condition_on(const FockState& s, const std::vector<ModeId>& modes,
                                      const std::vector<int>& outcome) {
    auto proj = project_modes(s, modes, outcome);
    if (proj.weight <= 0.0)
        throw std::domain_error("conditioning on an outcome of zero probability");
    double total = s.norm_squared();
    return {outcome, proj.weight / total,
            detail::drop_modes_and_normalize(proj.state, detail::resolve_modes(s, modes),
                                             proj.weight)};
}

}  // namespace swapsim
