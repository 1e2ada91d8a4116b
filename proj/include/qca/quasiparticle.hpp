#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/fits.hpp"
#include "qca/lattice.hpp"
#include "qca/statevec.hpp"

namespace qca {

// Domain-wall quasiparticle detection on measured bitstrings. Detector j
// (j = 1 .. L-1) fires when the window around bond j matches one of the
// patterns 0001 / 1000 / 1001 (edges: 001 on the left, 100 on the right).

struct QuasiparticleRecord {
    int shot_index = -1;
    std::vector<int> positions; // strictly increasing detector indices
    int q = 0;                  // total count, = positions.size()
};

inline QuasiparticleRecord detect(const std::string& bits, int shot_index = -1) {
    const int L = static_cast<int>(bits.size());
    if (L < 4) throw std::invalid_argument("detect: bitstring must have length >= 4");
    for (char c : bits)
        if (c != '0' && c != '1') throw std::invalid_argument("detect: bad character");
    auto n = [&](int j) { return bits[std::size_t(j)] == '1'; };
    QuasiparticleRecord rec;
    rec.shot_index = shot_index;
    for (int j = 1; j <= L - 1; ++j) {
        bool fired = false;
        if (j == 1) {
            fired = !n(0) && !n(1) && n(2); // q_1 = P0 P1 n2
        } else if (j == L - 1) {
            fired = n(L - 3) && !n(L - 2) && !n(L - 1); // q_{L-1} = n P P
        } else {
            bool p1 = !n(j - 2) && !n(j - 1) && !n(j) && n(j + 1);
            bool p2 = n(j - 2) && !n(j - 1) && !n(j) && !n(j + 1);
            bool p3 = n(j - 2) && !n(j - 1) && !n(j) && n(j + 1);
            fired = p1 || p2 || p3;
        }
        if (fired) rec.positions.push_back(j);
    }
    rec.q = static_cast<int>(rec.positions.size());
    return rec;
}

// Exact expectation of the total quasiparticle number on a state: Q is
// diagonal, so this is a weighted count over basis labels.
inline double mean_q_exact(const QuantumState& s) {
    double acc = 0;
    const int L = s.n_sites();
    if (L < 4) throw std::invalid_argument("mean_q_exact: need >= 4 sites");
    std::string bits(static_cast<std::size_t>(L), '0');
    for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        double w = std::norm(s.amps[idx]);
        if (w < 1e-300) continue;
        for (int j = 0; j < L; ++j)
            bits[std::size_t(j)] = s.digit(idx, j) == s.one_digit(j) ? '1' : '0';
        acc += w * detect(bits).q;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// histograms

struct StepHistogram {
    int step = 0;
    bool empty = true;        // no shots passed the Q = k condition
    int n_conditioned = 0;    // shots retained
    std::map<int, int> counts; // detector position -> count
};

// Quasiparticle position histogram per time step, conditioned on shots with
// exactly k detected quasiparticles. Non-matching shots are discarded, not
// reweighted; steps without conditioned shots are flagged empty.
inline std::vector<StepHistogram> position_histogram(const std::vector<ShotEnsemble>& per_step,
                                                     int k) {
    if (k < 0) throw std::invalid_argument("position_histogram: k must be >= 0");
    std::vector<StepHistogram> out;
    out.reserve(per_step.size());
    for (std::size_t t = 0; t < per_step.size(); ++t) {
        StepHistogram h;
        h.step = static_cast<int>(t);
        for (const auto& bits : per_step[t].bitstrings) {
            auto rec = detect(bits);
            if (rec.q != k) continue;
            ++h.n_conditioned;
            for (int pos : rec.positions) h.counts[pos]++;
        }
        h.empty = h.n_conditioned == 0;
        out.push_back(std::move(h));
    }
    return out;
}

// ---------------------------------------------------------------------------
// staggered magnetization

// M = <n>_A - <n>_B from per-site populations.
inline double staggered_magnetization(const ChainSpec& chain, const std::vector<double>& pops) {
    if (static_cast<int>(pops.size()) != chain.n_sites)
        throw std::invalid_argument("staggered_magnetization: population size mismatch");
    if (!chain.has_species(Species::A) || !chain.has_species(Species::B))
        throw std::invalid_argument("staggered_magnetization: chain needs both species");
    double sa = 0, sb = 0;
    int na = 0, nb = 0;
    for (int j = 0; j < chain.n_sites; ++j) {
        if (chain.species_of(j) == Species::A) {
            sa += pops[std::size_t(j)];
            ++na;
        } else {
            sb += pops[std::size_t(j)];
            ++nb;
        }
    }
    return sa / na - sb / nb;
}

inline double staggered_magnetization(const ChainSpec& chain, const ShotEnsemble& shots) {
    if (shots.bitstrings.empty())
        throw std::invalid_argument("staggered_magnetization: empty ensemble");
    std::vector<double> pops(static_cast<std::size_t>(chain.n_sites), 0.0);
    for (const auto& b : shots.bitstrings)
        for (int j = 0; j < chain.n_sites; ++j) pops[std::size_t(j)] += b[std::size_t(j)] == '1';
    for (auto& p : pops) p /= double(shots.n_shots());
    return staggered_magnetization(chain, pops);
}

// Decay-constant helper: fit M(t) for t = 1..T (pulse index) to the damped
// classical orbit and return the fit.
inline DampedOrbitFit staggered_decay_fit(const std::vector<double>& m_per_pulse) {
    std::vector<double> t;
    t.reserve(m_per_pulse.size());
    for (std::size_t i = 0; i < m_per_pulse.size(); ++i) t.push_back(double(i + 1));
    return fit_damped_orbit(t, m_per_pulse);
}

// ---------------------------------------------------------------------------
// quasiparticle growth

struct GrowthPoint {
    int pulse = 0;
    double mean_q = 0;
    bool retained = true; // false for omitted multiple-of-three pulse counts
};

// Mean Q per pulse count from measured ensembles, optionally omitting pulse
// counts that are multiples of three (the convention used for the rotation
// scans, where those steps are dominated by single-atom loss artifacts).
inline std::vector<GrowthPoint> quasiparticle_growth(const std::vector<ShotEnsemble>& per_pulse,
                                                     bool exclude_mod3 = true) {
    std::vector<GrowthPoint> out;
    for (std::size_t t = 0; t < per_pulse.size(); ++t) {
        GrowthPoint g;
        g.pulse = static_cast<int>(t);
        double acc = 0;
        for (const auto& b : per_pulse[t].bitstrings) acc += detect(b).q;
        g.mean_q = per_pulse[t].bitstrings.empty() ? 0.0 : acc / double(per_pulse[t].n_shots());
        g.retained = !(exclude_mod3 && g.pulse > 0 && g.pulse % 3 == 0);
        out.push_back(g);
    }
    return out;
}

} // namespace qca
