#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "qca/lattice.hpp"
#include "qca/statevec.hpp"

namespace qca {

// State-preparation-and-measurement error model: one 2x2 column-stochastic
// map per atom, assembled as a tensor product over the chain, with
// correction by local inversion.

struct SpamSpeciesParams {
    double eta = 1.0; // pumping fidelity
    double f_p = 0.0; // imaging false positive
    double f_n = 0.0; // imaging false negative
    double s = 1.0;   // imaging survival
    double d_g = 1.0; // ground-state detection
    double d_r = 1.0; // Rydberg-state detection

    void validate() const {
        for (double v : {eta, f_p, f_n, s, d_g, d_r})
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("SpamParams: probabilities must be in [0, 1]");
    }
};

struct SpamParams {
    std::map<Species, SpamSpeciesParams> by_species;

    const SpamSpeciesParams& of(Species sp) const {
        auto it = by_species.find(sp);
        if (it == by_species.end())
            throw std::invalid_argument("SpamParams: missing species block");
        return it->second;
    }
};

// measurement error probabilities
//   e0 = Dg Fn + (1-Dg)(1-Fp)   (true 1 read as 0 ... assigning outcome 1 err)
//   e1 = Dr Fp + (1-Dr)(1-Fn)
inline double spam_e0(const SpamSpeciesParams& p) {
    return p.d_g * p.f_n + (1.0 - p.d_g) * (1.0 - p.f_p);
}
inline double spam_e1(const SpamSpeciesParams& p) {
    return p.d_r * p.f_p + (1.0 - p.d_r) * (1.0 - p.f_n);
}

// Column-stochastic single-atom map A[measured][true]:
//   A = F eta [[1-e0, e1], [e0, 1-e1]]
//     + F (1-eta) [[1-e0, 1-e0], [e0, e0]]
//     + (1-F) [[e1, e1], [1-e1, 1-e1]]
using SpamMatrix = std::array<std::array<double, 2>, 2>;

inline SpamMatrix single_atom_map(const SpamSpeciesParams& p) {
    p.validate();
    const double e0 = spam_e0(p), e1 = spam_e1(p);
    const double f = p.s, eta = p.eta;
    SpamMatrix a{};
    a[0][0] = f * eta * (1 - e0) + f * (1 - eta) * (1 - e0) + (1 - f) * e1;
    a[0][1] = f * eta * e1 + f * (1 - eta) * (1 - e0) + (1 - f) * e1;
    a[1][0] = f * eta * e0 + f * (1 - eta) * e0 + (1 - f) * (1 - e1);
    a[1][1] = f * eta * (1 - e1) + f * (1 - eta) * e0 + (1 - f) * (1 - e1);
    return a;
}

inline SpamMatrix single_atom_map(const SpamParams& params, Species sp) {
    return single_atom_map(params.of(sp));
}

inline SpamMatrix spam_invert(const SpamMatrix& a) {
    double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (std::abs(det) < 1e-12)
        throw std::runtime_error("spam: single-atom map is not invertible");
    return SpamMatrix{{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

// ---------------------------------------------------------------------------
// distributions over bitstrings (index = binary label, site 0 = MSB)

namespace detail {
inline void spam_contract_site(std::vector<double>& p, int n_sites, int site,
                               const SpamMatrix& a) {
    std::size_t stride = std::size_t(1) << (n_sites - 1 - site);
    for (std::size_t base = 0; base < p.size(); ++base) {
        if (base & stride) continue;
        double p0 = p[base], p1 = p[base + stride];
        p[base] = a[0][0] * p0 + a[0][1] * p1;
        p[base + stride] = a[1][0] * p0 + a[1][1] * p1;
    }
}
} // namespace detail

inline void validate_distribution(const std::vector<double>& p) {
    double s = 0;
    for (double v : p) s += v;
    if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument("spam: distribution not normalized");
}

// p_measured = M p_true with M the tensor product of the single-atom maps,
// applied site by site without materializing the 2^N matrix.
inline std::vector<double> spam_forward(std::vector<double> p_true, const ChainSpec& chain,
                                        const SpamParams& params) {
    validate_distribution(p_true);
    if (p_true.size() != (std::size_t(1) << chain.n_sites))
        throw std::invalid_argument("spam_forward: distribution size mismatch");
    for (int j = 0; j < chain.n_sites; ++j)
        detail::spam_contract_site(p_true, chain.n_sites, j,
                                   single_atom_map(params, chain.species_of(j)));
    return p_true;
}

struct SpamCorrection {
    std::vector<double> distribution;
    double clipped_mass = 0; // total negative mass removed before renormalizing
};

// Estimate of the true distribution by per-site inversion; negative entries
// are clipped to zero and the result renormalized, with the removed mass
// recorded.
inline SpamCorrection spam_correct(std::vector<double> p_measured, const ChainSpec& chain,
                                   const SpamParams& params) {
    validate_distribution(p_measured);
    if (p_measured.size() != (std::size_t(1) << chain.n_sites))
        throw std::invalid_argument("spam_correct: distribution size mismatch");
    for (int j = 0; j < chain.n_sites; ++j)
        detail::spam_contract_site(p_measured, chain.n_sites, j,
                                   spam_invert(single_atom_map(params, chain.species_of(j))));
    SpamCorrection out;
    double clipped = 0, total = 0;
    for (auto& v : p_measured) {
        if (v < 0) {
            clipped += -v;
            v = 0;
        }
        total += v;
    }
    if (total <= 0) throw std::runtime_error("spam_correct: corrected distribution vanished");
    for (auto& v : p_measured) v /= total;
    out.distribution = std::move(p_measured);
    out.clipped_mass = clipped;
    return out;
}

inline std::vector<double> distribution_from_shots(const ShotEnsemble& shots) {
    if (shots.bitstrings.empty())
        throw std::invalid_argument("distribution_from_shots: empty ensemble");
    int n = shots.n_sites();
    std::vector<double> p(std::size_t(1) << n, 0.0);
    for (const auto& b : shots.bitstrings) {
        std::size_t idx = 0;
        for (char c : b) idx = (idx << 1) | std::size_t(c == '1');
        p[idx] += 1.0;
    }
    for (auto& v : p) v /= double(shots.n_shots());
    return p;
}

// Correction of a marginal distribution over a subset of sites; exact for
// the tensor-product error model, so local observables can be corrected
// without the 2^N vector.
inline SpamCorrection spam_correct_marginal(std::vector<double> marginal,
                                            const ChainSpec& chain,
                                            const std::vector<int>& sites,
                                            const SpamParams& params) {
    validate_distribution(marginal);
    if (marginal.size() != (std::size_t(1) << sites.size()))
        throw std::invalid_argument("spam_correct_marginal: size mismatch");
    int k = static_cast<int>(sites.size());
    for (int j = 0; j < k; ++j)
        detail::spam_contract_site(
            marginal, k, j,
            spam_invert(single_atom_map(params, chain.species_of(sites[std::size_t(j)]))));
    SpamCorrection out;
    double clipped = 0, total = 0;
    for (auto& v : marginal) {
        if (v < 0) {
            clipped += -v;
            v = 0;
        }
        total += v;
    }
    if (total <= 0) throw std::runtime_error("spam_correct_marginal: distribution vanished");
    for (auto& v : marginal) v /= total;
    out.distribution = std::move(marginal);
    out.clipped_mass = clipped;
    return out;
}

// ---------------------------------------------------------------------------
// calibration de-nesting (raw -> corrected, Table-style)

// Raw calibration numbers chain several error sources; the de-nesting order
// is discrimination -> survival -> pumping -> detection:
//   S    = (S_raw - Fp) / (1 - Fn - Fp)
//   Dg   = [(Dg_raw - Fp) / (1 - Fn - Fp)] / S
//   Dr   = Dr_raw / eta
inline SpamSpeciesParams spam_correct_raw(const SpamSpeciesParams& raw) {
    raw.validate();
    SpamSpeciesParams c = raw;
    double disc = 1.0 - raw.f_n - raw.f_p;
    if (disc <= 0) throw std::invalid_argument("spam_correct_raw: degenerate discrimination");
    c.s = (raw.s - raw.f_p) / disc;
    c.d_g = ((raw.d_g - raw.f_p) / disc) / c.s;
    c.d_r = std::min(1.0, raw.d_r / raw.eta);
    return c;
}

// Default parameters: the corrected Table values for both species.
inline SpamParams default_spam_params() {
    SpamParams p;
    p.by_species[Species::A] = SpamSpeciesParams{0.9943, 0.0047, 0.0058, 0.994, 0.978, 0.94};
    p.by_species[Species::B] = SpamSpeciesParams{0.9903, 0.0063, 0.0076, 0.979, 0.986, 1.00};
    return p;
}

} // namespace qca
