#pragma once

// Brute-force reference for linear-optical evolution, used only by tests.
//
// The whole interferometer is collapsed into one M x M mode matrix and the
// induced Fock-space unitary is evaluated through matrix permanents:
//
//   <m|U_F|n> = Per(U[n,m]) / sqrt(prod_i n_i! * prod_j m_j!)
//
// where U[n,m] repeats row i of U n_i times and column j m_j times. States are
// dense vectors over an enumerated occupation basis. Deliberately naive and
// structurally unrelated to the library's sparse per-ket expansion, so the two
// paths can check each other.

#include <complex>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

using cx = std::complex<double>;
using occupation = std::vector<int>;

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline int total_photons(const occupation& n) {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

// All occupation vectors with total <= max_total and per-mode <= max_per_mode,
// in lexicographic order.
inline std::vector<occupation> enumerate_basis(int n_modes, int max_total, int max_per_mode) {
    std::vector<occupation> out;
    occupation cur(static_cast<size_t>(n_modes), 0);
    while (true) {
        if (total_photons(cur) <= max_total) out.push_back(cur);
        int i = n_modes - 1;
        while (i >= 0) {
            if (cur[static_cast<size_t>(i)] < max_per_mode) {
                ++cur[static_cast<size_t>(i)];
                break;
            }
            cur[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

// Permanent by trying every permutation; fine for the <= 5 photon matrices here.
inline cx permanent(const std::vector<std::vector<cx>>& a) {
    const size_t n = a.size();
    if (n == 0) return cx(1.0, 0.0);
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    cx sum(0.0, 0.0);
    // iterate permutations in lexicographic order
    while (true) {
        cx prod(1.0, 0.0);
        for (size_t i = 0; i < n; ++i) prod *= a[i][perm[i]];
        sum += prod;
        // next_permutation, hand rolled to keep <algorithm> churn out of the hot loop
        size_t i = n - 1;
        while (i > 0 && perm[i - 1] >= perm[i]) --i;
        if (i == 0) break;
        size_t j = n - 1;
        while (perm[j] <= perm[i - 1]) --j;
        std::swap(perm[i - 1], perm[j]);
        for (size_t l = i, r = n - 1; l < r; ++l, --r) std::swap(perm[l], perm[r]);
    }
    return sum;
}

// Mode matrix, convention a_i^dag -> sum_j u[i][j] b_j^dag.
struct ModeMatrix {
    int n = 0;
    std::vector<std::vector<cx>> u;

    static ModeMatrix identity(int n) {
        ModeMatrix m;
        m.n = n;
        m.u.assign(static_cast<size_t>(n), std::vector<cx>(static_cast<size_t>(n), cx(0, 0)));
        for (int i = 0; i < n; ++i) m.u[static_cast<size_t>(i)][static_cast<size_t>(i)] = cx(1, 0);
        return m;
    }

    // a_i^dag -> t b_i^dag - r b_j^dag ; a_j^dag -> r b_i^dag + t b_j^dag
    static ModeMatrix beam_splitter(int n, int i, int j, double t, double r) {
        ModeMatrix m = identity(n);
        m.u[static_cast<size_t>(i)][static_cast<size_t>(i)] = cx(t, 0);
        m.u[static_cast<size_t>(i)][static_cast<size_t>(j)] = cx(-r, 0);
        m.u[static_cast<size_t>(j)][static_cast<size_t>(i)] = cx(r, 0);
        m.u[static_cast<size_t>(j)][static_cast<size_t>(j)] = cx(t, 0);
        return m;
    }

    static ModeMatrix phase(int n, int i, double phi) {
        ModeMatrix m = identity(n);
        m.u[static_cast<size_t>(i)][static_cast<size_t>(i)] = std::polar(1.0, phi);
        return m;
    }

    // Composition: apply *this first, then next. a -> U1 b, b -> U2 c gives a -> (U1 U2) c.
    ModeMatrix then(const ModeMatrix& next) const {
        if (n != next.n) throw std::invalid_argument("oracle: size mismatch");
        ModeMatrix out = identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cx s(0, 0);
                for (int k = 0; k < n; ++k)
                    s += u[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                         next.u[static_cast<size_t>(k)][static_cast<size_t>(j)];
                out.u[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
            }
        return out;
    }
};

inline std::vector<int> expand(const occupation& n) {
    std::vector<int> idx;
    for (size_t i = 0; i < n.size(); ++i)
        for (int k = 0; k < n[i]; ++k) idx.push_back(static_cast<int>(i));
    return idx;
}

// <m|U_F|n> through the permanent formula.
inline cx fock_element(const ModeMatrix& u, const occupation& m, const occupation& n) {
    if (total_photons(m) != total_photons(n)) return cx(0, 0);
    const std::vector<int> rows = expand(n);
    const std::vector<int> cols = expand(m);
    const size_t p = rows.size();
    std::vector<std::vector<cx>> sub(p, std::vector<cx>(p));
    for (size_t a = 0; a < p; ++a)
        for (size_t b = 0; b < p; ++b)
            sub[a][b] = u.u[static_cast<size_t>(rows[a])][static_cast<size_t>(cols[b])];
    double norm = 1.0;
    for (int v : m) norm *= factorial(v);
    for (int v : n) norm *= factorial(v);
    return permanent(sub) / std::sqrt(norm);
}

struct DenseState {
    std::vector<occupation> basis;
    std::map<occupation, int> index;
    std::vector<cx> amp;

    static DenseState empty(int n_modes, int max_total, int max_per_mode) {
        DenseState s;
        s.basis = enumerate_basis(n_modes, max_total, max_per_mode);
        for (size_t i = 0; i < s.basis.size(); ++i) s.index[s.basis[i]] = static_cast<int>(i);
        s.amp.assign(s.basis.size(), cx(0, 0));
        return s;
    }

    static DenseState from_terms(int n_modes, int max_total, int max_per_mode,
                                 const std::vector<std::pair<occupation, cx>>& terms) {
        DenseState s = empty(n_modes, max_total, max_per_mode);
        for (const auto& [ket, a] : terms) s.amp[static_cast<size_t>(s.index.at(ket))] += a;
        return s;
    }

    cx amplitude(const occupation& ket) const {
        auto it = index.find(ket);
        return it == index.end() ? cx(0, 0) : amp[static_cast<size_t>(it->second)];
    }

    double norm2() const {
        double s = 0;
        for (const cx& a : amp) s += std::norm(a);
        return s;
    }

    DenseState evolve(const ModeMatrix& u) const {
        DenseState out = *this;
        for (cx& a : out.amp) a = cx(0, 0);
        for (size_t in = 0; in < basis.size(); ++in) {
            if (std::abs(amp[in]) == 0.0) continue;
            for (size_t om = 0; om < basis.size(); ++om) {
                cx el = fock_element(u, basis[om], basis[in]);
                if (std::abs(el) != 0.0) out.amp[om] += amp[in] * el;
            }
        }
        return out;
    }

    // Marginal photon-number distribution over a subset of mode indices.
    std::map<occupation, double> born(const std::vector<int>& modes) const {
        std::map<occupation, double> dist;
        for (size_t i = 0; i < basis.size(); ++i) {
            double w = std::norm(amp[i]);
            if (w == 0.0) continue;
            occupation key;
            for (int m : modes) key.push_back(basis[i][static_cast<size_t>(m)]);
            dist[key] += w;
        }
        return dist;
    }

    // Project onto a fixed outcome on the given modes. Keeps all modes in place;
    // renormalizes unless the weight vanishes.
    DenseState project(const std::vector<int>& modes, const occupation& outcome, double* weight_out = nullptr) const {
        DenseState out = *this;
        double w = 0;
        for (size_t i = 0; i < basis.size(); ++i) {
            bool match = true;
            for (size_t k = 0; k < modes.size(); ++k)
                if (basis[i][static_cast<size_t>(modes[k])] != outcome[k]) { match = false; break; }
            if (!match)
                out.amp[i] = cx(0, 0);
            else
                w += std::norm(out.amp[i]);
        }
        if (weight_out) *weight_out = w;
        if (w > 0) {
            double inv = 1.0 / std::sqrt(w);
            for (cx& a : out.amp) a *= inv;
        }
        return out;
    }
};

}  // namespace oracle
