#pragma once

// Linear-optical elements acting on Fock states: beam splitters, phase
// shifters, the mirror-displacement phase map, and truncated coherent states.

#include <cmath>
#include <numbers>
#include <variant>

#include "swapsim/fock.hpp"

namespace swapsim {

inline constexpr double kBalancedAmplitude = 0.7071067811865476;  // 1/sqrt(2)

// Lossless two-mode coupler. Creation operators transform as
//   a_in1^dag -> t b_in1^dag - r b_in2^dag
//   a_in2^dag -> r b_in1^dag + t b_in2^dag
// (real rotation, det +1). With t = r = 1/sqrt(2) a single photon entering
// in1 leaves in the minus superposition (|1,0> - |0,1>)/sqrt(2), and a photon
// pair entering together bunches into (|2,0> - |0,2>)/sqrt(2).
struct BeamSplitter {
    ModeId in1;
    ModeId in2;
    double t = kBalancedAmplitude;
    double r = kBalancedAmplitude;
};

// exp(i n phi) on one mode.
struct PhaseShifter {
    ModeId mode;
    double phase = 0.0;
};

namespace detail {

inline double ipow(double base, int exp) {
    double p = 1.0;
    for (int k = 0; k < exp; ++k) p *= base;
    return p;
}

inline double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

inline double factorial_d(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace detail

inline FockState apply_bs(const FockState& in, const BeamSplitter& bs) {
    if (std::abs(bs.t * bs.t + bs.r * bs.r - 1.0) > kAmplitudeTolerance)
        throw std::invalid_argument("beam splitter is not lossless: t^2 + r^2 != 1");
    const std::size_t i1 = in.mode_index(bs.in1);
    const std::size_t i2 = in.mode_index(bs.in2);
    if (i1 == i2) throw std::invalid_argument("beam splitter needs two distinct modes");
    const std::string element =
        "beam splitter (" + bs.in1.label() + ", " + bs.in2.label() + ")";
    const int cutoff = in.cutoff();

    std::map<BasisKet, Complex> out;
    for (const auto& [ket, amp] : in.terms()) {
        const int n1 = ket.occupation(i1);
        const int n2 = ket.occupation(i2);
        if (n1 == 0 && n2 == 0) {
            out[ket] += amp;
            continue;
        }
        // Expand (t b1 - r b2)^n1 (r b1 + t b2)^n2 / sqrt(n1! n2!).
        const double in_norm = std::sqrt(detail::factorial_d(n1) * detail::factorial_d(n2));
        for (int k = 0; k <= n1; ++k) {
            for (int l = 0; l <= n2; ++l) {
                const int m1 = k + l;
                const int m2 = (n1 - k) + (n2 - l);
                if (m1 > cutoff || m2 > cutoff)
                    throw CutoffError(element, std::max(m1, m2), cutoff);
                double coef = detail::binomial(n1, k) * detail::binomial(n2, l) *
                              detail::ipow(bs.t, k) * detail::ipow(bs.r, n1 - k) *
                              detail::ipow(bs.r, l) * detail::ipow(bs.t, n2 - l);
                if ((n1 - k) & 1) coef = -coef;
                const double out_norm =
                    std::sqrt(detail::factorial_d(m1) * detail::factorial_d(m2));
                BasisKet nk = ket;
                nk.occ[i1] = static_cast<std::uint8_t>(m1);
                nk.occ[i2] = static_cast<std::uint8_t>(m2);
                out[nk] += amp * (coef * out_norm / in_norm);
            }
        }
    }
    return FockState::from_terms(in.modes(), cutoff, std::move(out));
}

inline FockState apply_phase(const FockState& in, const PhaseShifter& ps) {
    const std::size_t i = in.mode_index(ps.mode);
    std::map<BasisKet, Complex> out;
    for (const auto& [ket, amp] : in.terms()) {
        const int n = ket.occupation(i);
        out[ket] = n == 0 ? amp : amp * std::polar(1.0, ps.phase * n);
    }
    return FockState::from_terms(in.modes(), in.cutoff(), std::move(out));
}

// Exact half-wave action, amplitude * (-1)^n. Equivalent to a pi phase shift
// but free of the rounding in polar(1, pi), so label-interchange identities
// that rely on it hold bit for bit.
inline FockState apply_parity_flip(const FockState& in, const ModeId& mode) {
    const std::size_t i = in.mode_index(mode);
    std::map<BasisKet, Complex> out;
    for (const auto& [ket, amp] : in.terms())
        out[ket] = (ket.occupation(i) & 1) ? -amp : amp;
    return FockState::from_terms(in.modes(), in.cutoff(), std::move(out));
}

// Phase picked up by a mirror displaced by dx along the bisector of the
// incoming and outgoing beams: 2^{3/2} pi dx / wavelength. Both lengths in
// the same unit.
inline double mirror_phase(double dx, double wavelength) {
    if (!(wavelength > 0.0)) throw std::domain_error("wavelength must be positive");
    return 2.0 * std::numbers::sqrt2 * std::numbers::pi * dx / wavelength;
}

// Coherent state truncated at two photons: e^{-|a|^2/2} (|0> + a|1> + a^2/sqrt(2)|2>),
// renormalized within the cutoff. Restricted to the weak-field regime where
// the dropped tail is negligible.
inline FockState coherent_state(const ModeId& mode, Complex alpha, int cutoff = kDefaultCutoff) {
    if (cutoff < 2) throw std::invalid_argument("coherent state needs cutoff >= 2");
    const double a2 = std::norm(alpha);
    if (a2 > 0.25)
        throw std::invalid_argument("|alpha|^2 > 0.25 is outside the weak-field regime");
    const double kept = std::exp(-a2) * (1.0 + a2 + 0.5 * a2 * a2);
    if (1.0 - kept > 1e-3)
        throw std::domain_error("coherent amplitude too large for a two-photon truncation");
    const double envelope = std::exp(-0.5 * a2);
    FockState raw = FockState::superposition(
        {mode},
        {{{0}, Complex(envelope, 0.0)},
         {{1}, envelope * alpha},
         {{2}, envelope * alpha * alpha * (1.0 / std::numbers::sqrt2)}},
        cutoff);
    return raw.normalized();
}

using CircuitElement = std::variant<BeamSplitter, PhaseShifter>;

struct OpticalCircuit {
    std::vector<CircuitElement> elements;
};

inline FockState apply_element(const FockState& in, const BeamSplitter& bs) {
    return apply_bs(in, bs);
}

inline FockState apply_element(const FockState& in, const PhaseShifter& ps) {
    return apply_phase(in, ps);
}

inline FockState apply_circuit(const FockState& in, const OpticalCircuit& circuit) {
    FockState s = in;
    for (const CircuitElement& e : circuit.elements)
        s = std::visit([&](const auto& el) { return apply_element(s, el); }, e);
    return s;
}

}  // namespace swapsim
