#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/lattice.hpp"
#include "qca/pauli.hpp"
#include "qca/rng.hpp"

namespace qca {

// Default cap on the dense amplitude vector (2^24 amplitudes ~ 256 MB).
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t(1) << 24;

// Dense complex state over mixed local dimensions.
//   2-level sites: digit 0 = |0>, digit 1 = |1>  (1 = Rydberg)
//   3-level sites: digit 0 = |0>, digit 1 = |e>, digit 2 = |1>
// Basis label convention: site 0 is the most significant digit, so the basis
// index of |b_0 b_1 ... b_{n-1}> reads left to right like the printed
// bitstring.
struct QuantumState {
    std::shared_ptr<const ChainSpec> chain;
    std::vector<int> local_dims;
    std::vector<cd> amps;
    std::vector<char> lost; // trajectory bookkeeping; lost atoms read out '0'

    std::vector<std::size_t> strides;

    int n_sites() const { return static_cast<int>(local_dims.size()); }
    std::size_t dim() const { return amps.size(); }

    void init_strides() {
        int n = n_sites();
        strides.assign(static_cast<std::size_t>(n), 1);
        for (int j = n - 2; j >= 0; --j)
            strides[static_cast<std::size_t>(j)] =
                strides[static_cast<std::size_t>(j + 1)] *
                static_cast<std::size_t>(local_dims[static_cast<std::size_t>(j + 1)]);
    }

    int digit(std::size_t idx, int j) const {
        return static_cast<int>((idx / strides[static_cast<std::size_t>(j)]) %
                                static_cast<std::size_t>(local_dims[static_cast<std::size_t>(j)]));
    }

    // digit that encodes |1> on this site
    int one_digit(int j) const { return local_dims[static_cast<std::size_t>(j)] == 2 ? 1 : 2; }

    double norm2() const {
        double s = 0;
        for (const auto& a : amps) s += std::norm(a);
        return s;
    }

    void normalize() {
        double n = std::sqrt(norm2());
        if (n <= 0) throw std::runtime_error("QuantumState: cannot normalize zero vector");
        for (auto& a : amps) a /= n;
    }

    // population of |1> on each site
    std::vector<double> populations() const {
        std::vector<double> out(static_cast<std::size_t>(n_sites()), 0.0);
        for (std::size_t idx = 0; idx < dim(); ++idx) {
            double w = std::norm(amps[idx]);
            if (w == 0.0) continue;
            for (int j = 0; j < n_sites(); ++j)
                if (digit(idx, j) == one_digit(j)) out[static_cast<std::size_t>(j)] += w;
        }
        return out;
    }

    // population of |e> on one site (zero for 2-level sites)
    double e_population(int j) const {
        if (local_dims[static_cast<std::size_t>(j)] != 3) return 0.0;
        double s = 0;
        for (std::size_t idx = 0; idx < dim(); ++idx)
            if (digit(idx, j) == 1) s += std::norm(amps[idx]);
        return s;
    }

    double one_population(int j) const {
        double s = 0;
        for (std::size_t idx = 0; idx < dim(); ++idx)
            if (digit(idx, j) == one_digit(j)) s += std::norm(amps[idx]);
        return s;
    }
};

inline cd inner(const QuantumState& a, const QuantumState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cd s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

inline double overlap2(const QuantumState& a, const QuantumState& b) {
    return std::norm(inner(a, b));
}

// ---------------------------------------------------------------------------
// construction

inline QuantumState zero_state(std::shared_ptr<const ChainSpec> chain, int levels = 2,
                               std::size_t cap = kDefaultAmplitudeCap) {
    chain->validate();
    if (levels != 2 && levels != 3) throw std::invalid_argument("levels must be 2 or 3");
    QuantumState s;
    s.chain = std::move(chain);
    s.local_dims.assign(static_cast<std::size_t>(s.chain->n_sites), levels);
    std::size_t d = 1;
    for (int dm : s.local_dims) {
        d *= static_cast<std::size_t>(dm);
        if (d > cap) throw std::invalid_argument("state dimension exceeds amplitude cap");
    }
    s.amps.assign(d, cd(0, 0));
    s.amps[0] = cd(1, 0);
    s.lost.assign(static_cast<std::size_t>(s.chain->n_sites), 0);
    s.init_strides();
    return s;
}

// Tensor product of per-site kets (each of length = local dim of the site).
inline QuantumState product_state(std::shared_ptr<const ChainSpec> chain,
                                  const std::vector<std::vector<cd>>& site_kets,
                                  std::size_t cap = kDefaultAmplitudeCap) {
    chain->validate();
    if (static_cast<int>(site_kets.size()) != chain->n_sites)
        throw std::invalid_argument("product_state: one ket per site required");
    QuantumState s;
    s.chain = std::move(chain);
    s.local_dims.reserve(site_kets.size());
    std::size_t d = 1;
    for (const auto& k : site_kets) {
        if (k.size() != 2 && k.size() != 3)
            throw std::invalid_argument("product_state: site kets must have 2 or 3 entries");
        double n2 = 0;
        for (const auto& a : k) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > 1e-9)
            throw std::invalid_argument("product_state: single-site state not normalized");
        s.local_dims.push_back(static_cast<int>(k.size()));
        d *= k.size();
        if (d > cap) throw std::invalid_argument("state dimension exceeds amplitude cap");
    }
    s.init_strides();
    s.amps.assign(d, cd(0, 0));
    s.lost.assign(site_kets.size(), 0);
    for (std::size_t idx = 0; idx < d; ++idx) {
        cd a(1, 0);
        for (int j = 0; j < s.n_sites(); ++j)
            a *= site_kets[static_cast<std::size_t>(j)][static_cast<std::size_t>(s.digit(idx, j))];
        s.amps[idx] = a;
    }
    return s;
}

// Computational basis state from a bitstring over {0,1} ('1' = Rydberg).
inline QuantumState basis_state(std::shared_ptr<const ChainSpec> chain, const std::string& bits,
                                int levels = 2, std::size_t cap = kDefaultAmplitudeCap) {
    if (static_cast<int>(bits.size()) != chain->n_sites)
        throw std::invalid_argument("basis_state: bitstring length != n_sites");
    QuantumState s = zero_state(std::move(chain), levels, cap);
    std::size_t idx = 0;
    for (int j = 0; j < s.n_sites(); ++j) {
        char c = bits[static_cast<std::size_t>(j)];
        if (c != '0' && c != '1') throw std::invalid_argument("basis_state: bad character");
        if (c == '1') idx += s.strides[static_cast<std::size_t>(j)] *
                             static_cast<std::size_t>(s.one_digit(j));
    }
    s.amps[0] = cd(0, 0);
    s.amps[idx] = cd(1, 0);
    return s;
}

// ---------------------------------------------------------------------------
// kernels

// Apply a 2x2 matrix on the {|0>,|1>} subspace of one site (identity on |e>).
inline void apply_su2(QuantumState& s, int site, cd m00, cd m01, cd m10, cd m11) {
    const std::size_t str = s.strides[static_cast<std::size_t>(site)];
    const int one = s.one_digit(site);
    const std::size_t d = s.dim();
    for (std::size_t idx = 0; idx < d; ++idx) {
        if (s.digit(idx, site) != 0) continue;
        std::size_t partner = idx + str * static_cast<std::size_t>(one);
        cd a0 = s.amps[idx], a1 = s.amps[partner];
        s.amps[idx] = m00 * a0 + m01 * a1;
        s.amps[partner] = m10 * a0 + m11 * a1;
    }
}

// Rotation exp(-i theta/2 (cos(phase) X + sin(phase) Y)) on the 0-1 subspace.
inline void apply_rotation(QuantumState& s, int site, double theta, double axis_phase) {
    cd c = std::cos(theta / 2);
    cd mis = cd(0, -std::sin(theta / 2));
    cd em = std::exp(cd(0, -axis_phase));
    cd ep = std::exp(cd(0, axis_phase));
    apply_su2(s, site, c, mis * em, mis * ep, c);
}

// Diagonal phase on |1> of one site: |1> -> e^{i phi} |1>.
inline void apply_phase_on_one(QuantumState& s, int site, double phi) {
    const int one = s.one_digit(site);
    cd ph = std::exp(cd(0, phi));
    for (std::size_t idx = 0; idx < s.dim(); ++idx)
        if (s.digit(idx, site) == one) s.amps[idx] *= ph;
}

inline void apply_z(QuantumState& s, int site) { apply_phase_on_one(s, site, M_PI); }

inline void apply_x(QuantumState& s, int site) { apply_su2(s, site, 0, 1, 1, 0); }

// CZ between the |1> levels of two sites.
inline void apply_cz(QuantumState& s, int i, int j) {
    const int oi = s.one_digit(i), oj = s.one_digit(j);
    for (std::size_t idx = 0; idx < s.dim(); ++idx)
        if (s.digit(idx, i) == oi && s.digit(idx, j) == oj) s.amps[idx] = -s.amps[idx];
}

// ---------------------------------------------------------------------------
// species-selective product rotation (the global pulse primitive)

// Rotates every site of `species` that is NOT in `mask`. The mask is the set
// of AOD-shielded sites and must contain only sites of that species.
inline void apply_product_rotation(QuantumState& s, Species species, double theta,
                                   double axis_phase, const std::set<int>& mask = {}) {
    const ChainSpec& chain = *s.chain;
    for (int m : mask) {
        if (m < 0 || m >= chain.n_sites)
            throw std::invalid_argument("apply_product_rotation: mask site out of range");
        if (chain.species_of(m) != species)
            throw std::invalid_argument("apply_product_rotation: mask contains other-species sites");
    }
    for (int j : chain.sites_of(species)) {
        if (mask.count(j)) continue;
        apply_rotation(s, j, theta, axis_phase);
    }
}

// ---------------------------------------------------------------------------
// expectation values

namespace detail {
// Action of one letter on a digit of the 0-1 subspace.
// Returns target digit and coefficient; digit must encode |0> or |1>.
inline void letter_action(const PauliFactor& f, int digit_in, int one_digit, int& digit_out,
                          cd& coeff) {
    const bool is_one = digit_in == one_digit;
    switch (f.op) {
        case PauliOp::I:
            digit_out = digit_in;
            coeff = 1;
            return;
        case PauliOp::X:
            digit_out = is_one ? 0 : one_digit;
            coeff = 1;
            return;
        case PauliOp::Y:
            digit_out = is_one ? 0 : one_digit;
            coeff = is_one ? cd(0, -1) : cd(0, 1);
            return;
        case PauliOp::Z:
            digit_out = digit_in;
            coeff = is_one ? -1 : 1;
            return;
        case PauliOp::R:
            // R(a)|0> = e^{ia}|1>, R(a)|1> = e^{-ia}|0>
            digit_out = is_one ? 0 : one_digit;
            coeff = std::exp(cd(0, is_one ? -f.alpha : f.alpha));
            return;
    }
    digit_out = digit_in;
    coeff = 1;
}
} // namespace detail

// <psi| op |psi>. The operator acts on the {|0>,|1>} block; sites with
// non-identity letters must carry negligible |e> population.
inline double expect(const QuantumState& s, const PauliString& op) {
    if (op.n_sites() > s.n_sites())
        throw std::invalid_argument("expect: operator longer than chain");
    std::vector<int> active;
    for (int j = 0; j < op.n_sites(); ++j)
        if (op.at(j).op != PauliOp::I) active.push_back(j);
    for (int j : active)
        if (s.e_population(j) > 1e-9)
            throw std::invalid_argument("expect: operator touches |e>-populated site");

    cd val = 0;
    const std::size_t d = s.dim();
    for (std::size_t idx = 0; idx < d; ++idx) {
        cd a = s.amps[idx];
        if (a == cd(0, 0)) continue;
        std::size_t tgt = idx;
        cd coeff = op.sign;
        bool dead = false;
        for (int j : active) {
            int din = s.digit(idx, j);
            if (s.local_dims[static_cast<std::size_t>(j)] == 3 && din == 1) { dead = true; break; }
            int dout;
            cd c;
            detail::letter_action(op.at(j), din, s.one_digit(j), dout, c);
            coeff *= c;
            tgt += (static_cast<std::size_t>(dout) - static_cast<std::size_t>(din)) *
                   s.strides[static_cast<std::size_t>(j)];
        }
        if (dead) continue; // |e> amplitude below tolerance, annihilated by the 0-1 block op
        val += std::conj(s.amps[tgt]) * coeff * a;
    }
    const bool hermitian = std::abs(op.sign.imag()) < 1e-12;
    if (hermitian && std::abs(val.imag()) > 1e-9)
        throw std::logic_error("expect: non-real expectation of Hermitian operator");
    return val.real();
}

// ---------------------------------------------------------------------------
// measurement

struct ShotMeta {
    int time_step = -1;
    double basis_angle = 0.0;
    std::uint64_t seed = 0;
    std::string flags; // e.g. "postselected"
};

struct ShotEnsemble {
    std::vector<std::string> bitstrings; // '0'/'1', leftmost char = site 0
    ShotMeta meta;

    int n_sites() const {
        return bitstrings.empty() ? 0 : static_cast<int>(bitstrings.front().size());
    }
    std::size_t n_shots() const { return bitstrings.size(); }
};

// Projective sampling of the computational label. |e> reads out as '0'
// (intermediate-state atoms are recaptured as ground) and lost atoms read
// out '0' as well.
inline ShotEnsemble sample(const QuantumState& s, int n_shots, std::uint64_t seed) {
    if (n_shots < 1) throw std::invalid_argument("sample: n_shots must be >= 1");
    std::vector<double> cdf(s.dim());
    double acc = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        acc += std::norm(s.amps[i]);
        cdf[i] = acc;
    }
    if (acc <= 0) throw std::runtime_error("sample: zero-norm state");
    ShotEnsemble e;
    e.meta.seed = seed;
    e.bitstrings.reserve(static_cast<std::size_t>(n_shots));
    CounterRng rng(seed, 0x53414d50ull /* "SAMP" */);
    for (int k = 0; k < n_shots; ++k) {
        double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            std::distance(cdf.begin(), it), static_cast<std::ptrdiff_t>(s.dim()) - 1));
        std::string bits(static_cast<std::size_t>(s.n_sites()), '0');
        for (int j = 0; j < s.n_sites(); ++j) {
            if (s.lost[static_cast<std::size_t>(j)]) continue; // reads '0'
            bits[static_cast<std::size_t>(j)] =
                (s.digit(idx, j) == s.one_digit(j)) ? '1' : '0';
        }
        e.bitstrings.push_back(std::move(bits));
    }
    return e;
}

// Exact probability of each computational bitstring pattern on a subset of
// sites (marginal over everything else; |e> counts as '0').
inline double marginal_probability(const QuantumState& s, const std::vector<int>& sites,
                                   const std::string& pattern) {
    if (sites.size() != pattern.size())
        throw std::invalid_argument("marginal_probability: sites/pattern mismatch");
    double p = 0;
    for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        double w = std::norm(s.amps[idx]);
        if (w == 0) continue;
        bool match = true;
        for (std::size_t k = 0; k < sites.size(); ++k) {
            int j = sites[k];
            bool one = s.digit(idx, j) == s.one_digit(j) && !s.lost[static_cast<std::size_t>(j)];
            if ((pattern[k] == '1') != one) { match = false; break; }
        }
        if (match) p += w;
    }
    return p;
}

} // namespace qca
