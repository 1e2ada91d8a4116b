#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qca {

// Two atomic species on the chain. A is the Rb-like species, B the Cs-like
// one. Only B can be addressed by the AOD light shifts.
enum class Species : int { A = 0, B = 1 };

inline char species_char(Species s) { return s == Species::A ? 'A' : 'B'; }

inline Species species_from_char(char c) {
    if (c == 'A' || c == 'a') return Species::A;
    if (c == 'B' || c == 'b') return Species::B;
    throw std::invalid_argument("unknown species tag: " + std::string(1, c));
}

// Unordered species pair used as a key into the C6 table.
struct SpeciesPair {
    Species lo, hi;
    SpeciesPair(Species x, Species y) {
        if (static_cast<int>(x) <= static_cast<int>(y)) { lo = x; hi = y; }
        else { lo = y; hi = x; }
    }
    bool operator<(const SpeciesPair& o) const {
        if (lo != o.lo) return static_cast<int>(lo) < static_cast<int>(o.lo);
        return static_cast<int>(hi) < static_cast<int>(o.hi);
    }
};

// Default van der Waals coefficients, MHz um^6.
// A-B is the measured interspecies value (662 GHz um^6). The intraspecies
// defaults are chosen so that the next-nearest-neighbor shift at 10.6 um is
// 0.3 MHz (A-A) and 0.2 MHz (B-B); they are not measured and stay
// configurable.
inline constexpr double kDefaultC6AB = 662.0e3;
inline double default_c6_same(Species s) {
    const double d_nnn = 10.6;
    const double v = (s == Species::A) ? 0.3 : 0.2;
    return v * std::pow(d_nnn, 6);
}

// Geometry + species pattern + interaction coefficients of a 1D chain.
// Immutable after construction; safe to share between workers.
struct ChainSpec {
    int n_sites = 0;
    double spacing = 0.0; // um, uniform nearest-neighbor
    std::vector<Species> pattern;
    std::map<SpeciesPair, double> c6; // MHz um^6

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("ChainSpec: n_sites must be >= 1");
        if (!(spacing > 0.0)) throw std::invalid_argument("ChainSpec: spacing must be > 0");
        if (static_cast<int>(pattern.size()) != n_sites)
            throw std::invalid_argument("ChainSpec: pattern length != n_sites");
        for (const auto& [k, v] : c6)
            if (v < 0.0) throw std::invalid_argument("ChainSpec: c6 must be >= 0");
    }

    Species species_of(int j) const { return pattern.at(static_cast<std::size_t>(j)); }

    std::vector<int> sites_of(Species s) const {
        std::vector<int> out;
        for (int j = 0; j < n_sites; ++j)
            if (pattern[static_cast<std::size_t>(j)] == s) out.push_back(j);
        return out;
    }

    bool has_species(Species s) const {
        for (auto p : pattern)
            if (p == s) return true;
        return false;
    }

    double c6_of(Species x, Species y) const {
        auto it = c6.find(SpeciesPair(x, y));
        return it == c6.end() ? 0.0 : it->second;
    }
};

inline ChainSpec build_alternating_chain(int n_sites, double spacing_um, Species first) {
    if (n_sites < 1) throw std::invalid_argument("build_alternating_chain: n_sites must be >= 1");
    if (!(spacing_um > 0.0)) throw std::invalid_argument("build_alternating_chain: spacing must be > 0");
    ChainSpec c;
    c.n_sites = n_sites;
    c.spacing = spacing_um;
    c.pattern.resize(static_cast<std::size_t>(n_sites));
    Species other = (first == Species::A) ? Species::B : Species::A;
    for (int j = 0; j < n_sites; ++j)
        c.pattern[static_cast<std::size_t>(j)] = (j % 2 == 0) ? first : other;
    c.c6[SpeciesPair(Species::A, Species::B)] = kDefaultC6AB;
    c.c6[SpeciesPair(Species::A, Species::A)] = default_c6_same(Species::A);
    c.c6[SpeciesPair(Species::B, Species::B)] = default_c6_same(Species::B);
    return c;
}

inline ChainSpec build_uniform_chain(int n_sites, double spacing_um, Species species) {
    if (n_sites < 1) throw std::invalid_argument("build_uniform_chain: n_sites must be >= 1");
    if (!(spacing_um > 0.0)) throw std::invalid_argument("build_uniform_chain: spacing must be > 0");
    ChainSpec c;
    c.n_sites = n_sites;
    c.spacing = spacing_um;
    c.pattern.assign(static_cast<std::size_t>(n_sites), species);
    c.c6[SpeciesPair(Species::A, Species::B)] = kDefaultC6AB;
    c.c6[SpeciesPair(Species::A, Species::A)] = default_c6_same(Species::A);
    c.c6[SpeciesPair(Species::B, Species::B)] = default_c6_same(Species::B);
    return c;
}

// V_ij = C6 / r^6 in MHz (ordinary frequency). Angular 2*pi factors are
// applied only inside Hamiltonian construction.
inline double interaction(const ChainSpec& chain, int i, int j) {
    if (i == j) throw std::invalid_argument("interaction: i == j");
    if (i < 0 || j < 0 || i >= chain.n_sites || j >= chain.n_sites)
        throw std::invalid_argument("interaction: site out of range");
    double r = std::abs(i - j) * chain.spacing;
    double c6 = chain.c6_of(chain.species_of(i), chain.species_of(j));
    return c6 / std::pow(r, 6);
}

// Same, but from explicit positions (used with per-shot position noise).
inline double interaction_at(const ChainSpec& chain, int i, int j, double r_um) {
    double c6 = chain.c6_of(chain.species_of(i), chain.species_of(j));
    return c6 / std::pow(r_um, 6);
}

} // namespace qca
