#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/pauli.hpp"

namespace qca {

// Symbolic Heisenberg propagation of Pauli strings through the Clifford
// layers used by the automata. Conjugation direction is U^dag P U in the
// paper's step-composition convention (which matches the glider relations
// U0 -> U1 -> ...); see graph_step_heisenberg.

struct CliffordLayer {
    enum class Kind { sqrtx_all, cz_chain, s_boundary, z_all, x_all };
    Kind kind = Kind::sqrtx_all;
    std::vector<int> targets; // sites; cz_chain pairs are (t[k], t[k]+1) with t[k+1]=t[k]+1
};

namespace detail {

struct LetterMap {
    // image of X, Y, Z as (letter, sign)
    PauliOp img[3];
    int sgn[3]; // +1 / -1
};

// sqrt(X) = exp(-i pi X/4):  Z -> Y, Y -> -Z, X -> X
inline constexpr LetterMap kSqrtX{{PauliOp::X, PauliOp::Z, PauliOp::Y}, {+1, -1, +1}};
// inverse of sqrt(X):        Z -> -Y, Y -> Z, X -> X
inline constexpr LetterMap kSqrtXInv{{PauliOp::X, PauliOp::Z, PauliOp::Y}, {+1, +1, -1}};
// sqrt(X) pulse driven with phase pi/2 (axis +Y), same conjugation direction:
//                            Z -> X, X -> -Z, Y -> Y
inline constexpr LetterMap kSqrtYFwd{{PauliOp::Z, PauliOp::Y, PauliOp::X}, {-1, +1, +1}};
inline constexpr LetterMap kSqrtYInv{{PauliOp::Z, PauliOp::Y, PauliOp::X}, {+1, +1, -1}};
// S = exp(-i pi Z/4):        X -> -Y, Y -> X, Z -> Z
inline constexpr LetterMap kS{{PauliOp::Y, PauliOp::X, PauliOp::Z}, {-1, +1, +1}};
inline constexpr LetterMap kSInv{{PauliOp::Y, PauliOp::X, PauliOp::Z}, {+1, -1, +1}};
// Z:                         X -> -X, Y -> -Y, Z -> Z
inline constexpr LetterMap kZ{{PauliOp::X, PauliOp::Y, PauliOp::Z}, {-1, -1, +1}};
// X:                         X -> X, Y -> -Y, Z -> -Z
inline constexpr LetterMap kX{{PauliOp::X, PauliOp::Y, PauliOp::Z}, {+1, -1, -1}};

inline void apply_letter_map(PauliString& p, int site, const LetterMap& m) {
    if (site >= p.n_sites()) return;
    PauliFactor f = p.at(site);
    if (f.op == PauliOp::I) return;
    if (f.op == PauliOp::R)
        throw std::invalid_argument("clifford: R(alpha) factor unsupported");
    int k = static_cast<int>(f.op) - 1; // X=0 Y=1 Z=2
    p.set(site, m.img[k]);
    p.sign *= static_cast<double>(m.sgn[k]);
}

// CZ on pair (i, i+1): X_i -> X_i Z_{i+1}, Y_i -> Y_i Z_{i+1} and vice versa.
// Conjugation is the product of the per-site images, so the Z correction for
// site i multiplies P_j from the left while the one for site j multiplies
// P_i from the right; the order matters when both letters anticommute with Z.
inline void apply_cz_pair(PauliString& p, int i, int j) {
    auto fi = p.at(i), fj = p.at(j);
    auto flips = [](PauliOp o) { return o == PauliOp::X || o == PauliOp::Y; };
    if (fi.op == PauliOp::R || fj.op == PauliOp::R)
        throw std::invalid_argument("clifford: R(alpha) factor unsupported");
    PauliString zi = PauliString::single_site(p.n_sites(), i, PauliOp::Z);
    PauliString zj = PauliString::single_site(p.n_sites(), j, PauliOp::Z);
    if (flips(fj.op)) p = pauli_mul(p, zi);
    if (flips(fi.op)) p = pauli_mul(zj, p);
}

} // namespace detail

inline PauliString conjugate(const PauliString& pauli, const CliffordLayer& layer) {
    if (pauli.has_r()) throw std::invalid_argument("conjugate: R(alpha) factor unsupported");
    PauliString p = pauli;
    switch (layer.kind) {
        case CliffordLayer::Kind::sqrtx_all:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kSqrtX);
            break;
        case CliffordLayer::Kind::s_boundary:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kS);
            break;
        case CliffordLayer::Kind::z_all:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kZ);
            break;
        case CliffordLayer::Kind::x_all:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kX);
            break;
        case CliffordLayer::Kind::cz_chain:
            for (std::size_t k = 0; k + 1 < layer.targets.size(); ++k) {
                if (layer.targets[k + 1] != layer.targets[k] + 1)
                    throw std::invalid_argument("cz_chain: pairs must be (i, i+1)");
                detail::apply_cz_pair(p, layer.targets[k], layer.targets[k + 1]);
            }
            break;
    }
    return p;
}

// Conjugation by the inverse layer (undoes conjugate()).
inline PauliString conjugate_inverse(const PauliString& pauli, const CliffordLayer& layer) {
    if (pauli.has_r()) throw std::invalid_argument("conjugate: R(alpha) factor unsupported");
    PauliString p = pauli;
    switch (layer.kind) {
        case CliffordLayer::Kind::sqrtx_all:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kSqrtXInv);
            break;
        case CliffordLayer::Kind::s_boundary:
            for (int t : layer.targets) detail::apply_letter_map(p, t, detail::kSInv);
            break;
        default:
            return conjugate(pauli, layer); // self-inverse layers
    }
    return p;
}

// Heisenberg map of one Graph-State step on n data sites. Matches
// qca_ideal::graph_step exactly: for any state, <P> after the step equals
// <graph_step_heisenberg(P)> before it... in the transported direction
// <P>_before = <graph_step_heisenberg(P)>_after; equivalently
// U Z0 U^dag = X0 Z1 (the paper's U^dag U_0 U = U_1 glider relation).
inline PauliString graph_step_heisenberg(const PauliString& pauli, int n_sites) {
    if (pauli.has_r()) throw std::invalid_argument("graph step: R(alpha) factor unsupported");
    PauliString p = pauli;
    if (p.n_sites() < n_sites) {
        PauliString q = PauliString::identity(n_sites);
        q.sign = p.sign;
        for (int j = 0; j < p.n_sites(); ++j) q.factors[static_cast<std::size_t>(j)] = p.at(j);
        p = q;
    }
    // applied order of the step: Z layer, pulse about +Y, CZ chain
    for (int j = 0; j < n_sites; ++j) detail::apply_letter_map(p, j, detail::kZ);
    for (int j = 0; j < n_sites; ++j) detail::apply_letter_map(p, j, detail::kSqrtYFwd);
    for (int j = 0; j + 1 < n_sites; ++j) detail::apply_cz_pair(p, j, j + 1);
    return p;
}

inline PauliString graph_step_heisenberg_inverse(const PauliString& pauli, int n_sites) {
    PauliString p = pauli;
    if (p.n_sites() < n_sites) {
        PauliString q = PauliString::identity(n_sites);
        q.sign = p.sign;
        for (int j = 0; j < p.n_sites(); ++j) q.factors[static_cast<std::size_t>(j)] = p.at(j);
        p = q;
    }
    for (int j = 0; j + 1 < n_sites; ++j) detail::apply_cz_pair(p, j, j + 1);
    for (int j = 0; j < n_sites; ++j) detail::apply_letter_map(p, j, detail::kSqrtYInv);
    for (int j = 0; j < n_sites; ++j) detail::apply_letter_map(p, j, detail::kZ);
    return p;
}

// ---------------------------------------------------------------------------
// gliders

// Upward glider with label k in 0..n: X_{k-1} Z_k with out-of-range factors
// dropped (U_0 = Z_0, U_n = X_{n-1}).
inline PauliString glider_u(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("glider_u: label out of range");
    PauliString p = PauliString::identity(n);
    if (k >= 1) p.set(k - 1, PauliOp::X);
    if (k <= n - 1) p.set(k, PauliOp::Z);
    return p;
}

// Downward glider, the spatial mirror of glider_u: Z_{n-1-k} X_{n-k} with
// out-of-range factors dropped (D_0 = Z_{n-1}, D_n = X_0). The paper indexes
// these top-down: its D_i = Z_i X_{i+1} equals glider_d(n, n-1-i).
inline PauliString glider_d(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("glider_d: label out of range");
    PauliString p = PauliString::identity(n);
    if (k <= n - 1) p.set(n - 1 - k, PauliOp::Z);
    if (k >= 1) p.set(n - k, PauliOp::X);
    return p;
}

struct GliderPoint {
    PauliString op;
    char family = '?'; // 'U', 'D' or '?'
    int label = -1;
    bool boundary_turn = false; // family changed at this step
};

namespace detail {
inline void classify_glider(GliderPoint& g, int n) {
    g.family = '?';
    g.label = -1;
    for (int k = 0; k <= n; ++k) {
        if (g.op.same_letters(glider_u(n, k))) { g.family = 'U'; g.label = k; return; }
    }
    for (int k = 0; k <= n; ++k) {
        if (g.op.same_letters(glider_d(n, k))) { g.family = 'D'; g.label = k; return; }
    }
}
} // namespace detail

// Repeated conjugation of an initial operator through graph steps. Records
// family changes at the chain boundary.
inline std::vector<GliderPoint> glider_trajectory(const PauliString& initial, int n_steps,
                                                  int n_sites) {
    if (n_steps < 0) throw std::invalid_argument("glider_trajectory: n_steps must be >= 0");
    std::vector<GliderPoint> out;
    GliderPoint g;
    g.op = initial;
    detail::classify_glider(g, n_sites);
    out.push_back(g);
    for (int t = 0; t < n_steps; ++t) {
        GliderPoint h;
        h.op = graph_step_heisenberg(out.back().op, n_sites);
        detail::classify_glider(h, n_sites);
        h.boundary_turn = h.family != out.back().family && h.family != '?' &&
                          out.back().family != '?';
        out.push_back(h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// cluster stabilizers

// S_0 = X_0 Z_1, bulk S_i = Z_{i-1} X_i Z_{i+1}, S_{n-1} = Z_{n-2} X_{n-1}.
inline std::vector<PauliString> cluster_stabilizers(int n) {
    if (n < 2) throw std::invalid_argument("cluster_stabilizers: n must be >= 2");
    std::vector<PauliString> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        PauliString p = PauliString::identity(n);
        if (i > 0) p.set(i - 1, PauliOp::Z);
        p.set(i, PauliOp::X);
        if (i + 1 < n) p.set(i + 1, PauliOp::Z);
        out.push_back(p);
    }
    return out;
}

// Expectation of a Pauli string on the stabilizer state with the given
// generators: +1/-1 if +-P is in the group, else 0. Generators must be
// independent.
inline int stabilizer_expectation(const std::vector<PauliString>& gens, const PauliString& p) {
    if (gens.empty()) return 0;
    const int n = gens.front().n_sites();
    // GF(2) elimination over symplectic (x|z) bit rows
    auto bits = [n](const PauliString& q) {
        std::vector<int> v(static_cast<std::size_t>(2 * n), 0);
        for (int j = 0; j < n; ++j) {
            PauliOp o = q.at(j).op;
            if (o == PauliOp::X || o == PauliOp::Y) v[static_cast<std::size_t>(j)] = 1;
            if (o == PauliOp::Z || o == PauliOp::Y) v[static_cast<std::size_t>(n + j)] = 1;
        }
        return v;
    };
    std::vector<std::vector<int>> rows;
    std::vector<PauliString> ops;
    for (const auto& g : gens) {
        rows.push_back(bits(g));
        ops.push_back(g);
    }
    std::vector<int> target = bits(p);
    PauliString acc = PauliString::identity(n);
    std::size_t r = 0;
    for (std::size_t col = 0; col < static_cast<std::size_t>(2 * n) && r < rows.size(); ++col) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        std::swap(ops[piv], ops[r]);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k != r && rows[k][col] == 1) {
                for (std::size_t c = 0; c < static_cast<std::size_t>(2 * n); ++c)
                    rows[k][c] ^= rows[r][c];
                ops[k] = pauli_mul(ops[k], ops[r]);
            }
        }
        if (target[col] == 1) {
            for (std::size_t c = 0; c < static_cast<std::size_t>(2 * n); ++c)
                target[c] ^= rows[r][c];
            acc = pauli_mul(acc, ops[r]);
        }
        ++r;
    }
    for (int b : target)
        if (b) return 0; // not in the group modulo signs
    // acc has the same letters as p; compare signs
    cd ratio = p.sign / acc.sign;
    if (std::abs(ratio - cd(1, 0)) < 1e-9) return +1;
    if (std::abs(ratio + cd(1, 0)) < 1e-9) return -1;
    return 0; // i-phase mismatch: p is not Hermitian-compatible with the group
}

// Stabilizer generators of graph_step^t |0^n>.
inline std::vector<PauliString> graph_step_state_generators(int n, int t) {
    std::vector<PauliString> gens;
    gens.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) gens.push_back(PauliString::single_site(n, i, PauliOp::Z));
    for (int s = 0; s < t; ++s)
        for (auto& g : gens) g = graph_step_heisenberg(g, n);
    return gens;
}

} // namespace qca
