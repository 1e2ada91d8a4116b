#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "qca/statevec.hpp"

namespace qca {

// Idealized unitary steps: perfect nearest-neighbor blockade, no interaction
// tails, instantaneous pulses.

struct PxpStep {
    Species species = Species::A;
    double theta = M_PI;
    double axis_phase = 0.0;
};

struct MediatedLayer {
    double delta = 0.0; // detuning in units of omega
    double omega = 2.9; // MHz
    Species data_species = Species::B;
    Species aux_species = Species::A;
    double phi_extra = 0.0; // the unknown phase phi; injectable for tests
};

// Phi(Delta) = pi (1 - Delta / sqrt(Omega^2 + Delta^2)) with Delta in units
// of Omega.
inline double mediated_phi_of_delta(double delta_over_omega) {
    double r = delta_over_omega / std::sqrt(1.0 + delta_over_omega * delta_over_omega);
    if (std::isinf(delta_over_omega)) r = delta_over_omega > 0 ? 1.0 : -1.0;
    return M_PI * (1.0 - r);
}

namespace detail {
inline void require_two_level(const QuantumState& s, const char* who) {
    for (int d : s.local_dims)
        if (d != 2) throw std::invalid_argument(std::string(who) + ": requires 2-level sites");
}
} // namespace detail

// One blockade-projected rotation on a single site: the 0-1 rotation applied
// only where every existing neighbor is in |0>.
inline void projected_rotation(QuantumState& s, int site, double theta, double axis_phase) {
    const int n = s.n_sites();
    const std::size_t str = s.strides[static_cast<std::size_t>(site)];
    const int one = s.one_digit(site);
    cd c = std::cos(theta / 2);
    cd mis = cd(0, -std::sin(theta / 2));
    cd m01 = mis * std::exp(cd(0, -axis_phase));
    cd m10 = mis * std::exp(cd(0, axis_phase));
    for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        if (s.digit(idx, site) != 0) continue;
        if (site > 0 && s.digit(idx, site - 1) != 0) continue;
        if (site + 1 < n && s.digit(idx, site + 1) != 0) continue;
        std::size_t partner = idx + str * static_cast<std::size_t>(one);
        cd a0 = s.amps[idx], a1 = s.amps[partner];
        s.amps[idx] = cd(c) * a0 + m01 * a1;
        s.amps[partner] = m10 * a0 + cd(c) * a1;
    }
}

// prod_j exp(-i theta/2 P_{j-1} G_j P_{j+1}) over sites j of the species.
// Boundary sites carry a single projector. Factors commute.
inline void pxp_pulse(QuantumState& s, const PxpStep& step) {
    detail::require_two_level(s, "pxp_pulse");
    if (!s.chain->has_species(step.species))
        throw std::invalid_argument("pxp_pulse: species not present in chain");
    for (int j : s.chain->sites_of(step.species))
        projected_rotation(s, j, step.theta, step.axis_phase);
}

// Alternating-species automaton starting with species A. Records <n_j> after
// each pulse; row 0 is the initial state.
inline std::vector<std::vector<double>> run_pxp_automaton(QuantumState& s, int n_pulses,
                                                          double theta,
                                                          double axis_phase = 0.0) {
    if (n_pulses < 0) throw std::invalid_argument("run_pxp_automaton: n_pulses must be >= 0");
    std::vector<std::vector<double>> trace;
    trace.reserve(static_cast<std::size_t>(n_pulses) + 1);
    trace.push_back(s.populations());
    for (int t = 0; t < n_pulses; ++t) {
        Species sp = (t % 2 == 0) ? Species::A : Species::B;
        pxp_pulse(s, PxpStep{sp, theta, axis_phase});
        trace.push_back(s.populations());
    }
    return trace;
}

// Initialization pulse through the AOD mask: blockade-projected rotation on
// the B-species sites that are NOT shielded. Only species B is addressable.
inline void masked_init_pulse(QuantumState& s, const std::set<int>& mask, double theta,
                              double axis_phase = 0.0) {
    detail::require_two_level(s, "masked_init_pulse");
    for (int m : mask) {
        if (m < 0 || m >= s.n_sites())
            throw std::invalid_argument("masked_init_pulse: mask site out of range");
        if (s.chain->species_of(m) != Species::B)
            throw std::invalid_argument("masked_init_pulse: mask contains A-species sites");
    }
    for (int j : s.chain->sites_of(Species::B)) {
        if (mask.count(j)) continue;
        projected_rotation(s, j, theta, axis_phase);
    }
}

namespace detail {
// Data sites of the layer in chain order; verifies the alternating pattern
// data-aux-data-... over the span covered by the data species.
inline std::vector<int> mediated_data_sites(const QuantumState& s, const MediatedLayer& layer) {
    auto data = s.chain->sites_of(layer.data_species);
    if (data.empty()) throw std::invalid_argument("mediated layer: no data sites");
    for (std::size_t k = 0; k + 1 < data.size(); ++k) {
        if (data[k + 1] - data[k] != 2)
            throw std::invalid_argument("mediated layer: data/aux species must alternate");
        if (s.chain->species_of(data[k] + 1) != layer.aux_species)
            throw std::invalid_argument("mediated layer: bridging site is not aux species");
    }
    return data;
}

inline void require_aux_in_zero(const QuantumState& s, const MediatedLayer& layer) {
    for (int j : s.chain->sites_of(layer.aux_species)) {
        double p = s.one_population(j) + s.e_population(j);
        if (p > 1e-9)
            throw std::invalid_argument("mediated layer: aux atom not in |0>");
    }
}
} // namespace detail

// Diagonal mediated gate on every adjacent data pair bridged by an aux atom:
//   U = [e^{i(phi-Phi)Z/4} (x) e^{i(phi-Phi)Z/4}] e^{i(phi+Phi)ZZ/4}
// with Phi = pi(1 - Delta/sqrt(Omega^2+Delta^2)). Aux atoms stay in |0>.
inline void mediated_u_delta(QuantumState& s, const MediatedLayer& layer) {
    detail::require_aux_in_zero(s, layer);
    auto data = detail::mediated_data_sites(s, layer);
    const double phi = layer.phi_extra;
    const double Phi = mediated_phi_of_delta(layer.delta);
    // per-site phase e^{i(phi-Phi) z /4}, per-pair phase e^{i(phi+Phi) z z' /4}
    const double a1 = (phi - Phi) / 4.0;
    const double a2 = (phi + Phi) / 4.0;
    for (std::size_t k = 0; k + 1 < data.size(); ++k) {
        int i = data[k], j = data[k + 1];
        const int oi = s.one_digit(i), oj = s.one_digit(j);
        for (std::size_t idx = 0; idx < s.dim(); ++idx) {
            int zi = s.digit(idx, i) == oi ? -1 : 1;
            int zj = s.digit(idx, j) == oj ? -1 : 1;
            double ph = a1 * (zi + zj) + a2 * (zi * zj);
            s.amps[idx] *= std::exp(cd(0, ph));
        }
    }
}

// Echo sequence U_Delta, X on every data site, U_Delta.
inline void mediated_v_layer(QuantumState& s, const MediatedLayer& layer) {
    mediated_u_delta(s, layer);
    for (int j : s.chain->sites_of(layer.data_species)) apply_x(s, j);
    mediated_u_delta(s, layer);
}

namespace detail {
inline std::vector<int> graph_data_sites(const QuantumState& s) {
    // Data = species B when both species are present, else every site.
    const ChainSpec& c = *s.chain;
    bool both = c.has_species(Species::A) && c.has_species(Species::B);
    if (!both) {
        std::vector<int> all(static_cast<std::size_t>(c.n_sites));
        for (int j = 0; j < c.n_sites; ++j) all[static_cast<std::size_t>(j)] = j;
        return all;
    }
    for (int j : c.sites_of(Species::A)) {
        double p = s.one_population(j) + s.e_population(j);
        if (p > 1e-9) throw std::invalid_argument("graph_step: aux atom not in |0>");
    }
    return c.sites_of(Species::B);
}
} // namespace detail

// One Graph-State automaton step on the data sites:
//   U = (prod CZ_{i,i+1}) (prod sqrtX_i with drive phase pi/2) (prod Z_i)
// The pi/2 drive-phase offset and the Z layer absorb the mediated-gate
// corrections of the hardware sequence so that repeated steps propagate the
// gliders exactly; see clifford.hpp for the matching Heisenberg map.
inline void graph_step(QuantumState& s) {
    auto data = detail::graph_data_sites(s);
    for (int j : data)
        if (s.local_dims[static_cast<std::size_t>(j)] != 2 && s.e_population(j) > 1e-9)
            throw std::invalid_argument("graph_step: data site has |e> population");
    for (int j : data) apply_z(s, j);
    for (int j : data) apply_rotation(s, j, M_PI / 2, M_PI / 2); // sqrtX about the +Y axis
    for (std::size_t k = 0; k + 1 < data.size(); ++k) apply_cz(s, data[k], data[k + 1]);
}

} // namespace qca
