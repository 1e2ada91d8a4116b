#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qca/pipelines.hpp"
#include "qca/trajectories.hpp"

namespace qca {

// Detuning optimization for the mediated gate: (i) pi/2 pulse on the data,
// (ii) V_Delta echo, (iii) pi/2 pulse about the original axis, (iv) evaluate
// |<Z_1><Z_2>|; the optimum compensates the unknown phase so the gate is
// maximally entangling. The cost scales with cos(2 phi_prep), so the
// procedure drives its pulses at phase 0 where the signal is maximal.

struct DetuningScanPoint {
    double delta = 0; // units of omega
    double cost = 0;  // |<Z1><Z2>|
};

struct DetuningScanResult {
    double delta_star = 0;
    std::vector<DetuningScanPoint> scan;
};

namespace detail {
// quadratic refinement through the best grid point and its neighbors
inline double refine_argmin(const std::vector<DetuningScanPoint>& scan, std::size_t best) {
    if (best == 0 || best + 1 >= scan.size()) return scan[best].delta;
    double x0 = scan[best - 1].delta, x1 = scan[best].delta, x2 = scan[best + 1].delta;
    double y0 = scan[best - 1].cost, y1 = scan[best].cost, y2 = scan[best + 1].cost;
    double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if (std::abs(denom) < 1e-30) return x1;
    double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a <= 0) return x1;
    double v = -b / (2 * a);
    return std::min(std::max(v, x0), x2);
}
} // namespace detail

// Ideal engine variant: the echo layer is the closed-form diagonal gate, so
// the optimum solves phi + Phi(delta) = pi/2 exactly.
inline DetuningScanResult optimize_mediated_detuning_ideal(
    std::shared_ptr<const ChainSpec> chain, const std::vector<double>& delta_grid,
    double phi_extra = 0.0) {
    if (delta_grid.empty())
        throw std::invalid_argument("optimize_mediated_detuning: empty grid");
    const ChainSpec& c = *chain;
    auto data = c.sites_of(Species::B);
    if (data.size() != 2)
        throw std::invalid_argument("optimize_mediated_detuning: need a data-aux-data chain");
    DetuningScanResult out;
    for (double d : delta_grid) {
        QuantumState s = zero_state(chain);
        apply_product_rotation(s, Species::B, M_PI / 2, 0.0);
        MediatedLayer layer;
        layer.data_species = Species::B;
        layer.aux_species = Species::A;
        layer.delta = d;
        layer.phi_extra = phi_extra;
        mediated_v_layer(s, layer);
        apply_product_rotation(s, Species::B, M_PI / 2, 0.0);
        double z1 = expect(s, PauliString::single_site(c.n_sites, data[0], PauliOp::Z));
        double z2 = expect(s, PauliString::single_site(c.n_sites, data[1], PauliOp::Z));
        out.scan.push_back({d, std::abs(z1 * z2)});
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.scan.size(); ++k)
        if (out.scan[k].cost < out.scan[best].cost) best = k;
    out.delta_star = detail::refine_argmin(out.scan, best);
    return out;
}

// Physical engine variant: full Hamiltonian evolution of the four-step
// sequence (noiseless by default; pass a NoiseConfig to include channels).
inline DetuningScanResult optimize_mediated_detuning_physical(
    std::shared_ptr<const ChainSpec> chain, const std::vector<double>& delta_grid,
    double omega_mhz = 2.9, const NoiseConfig* noise_in = nullptr,
    const KrylovOptions& kopt = {}) {
    if (delta_grid.empty())
        throw std::invalid_argument("optimize_mediated_detuning: empty grid");
    const ChainSpec& c = *chain;
    auto data = c.sites_of(Species::B);
    if (data.size() != 2)
        throw std::invalid_argument("optimize_mediated_detuning: need a data-aux-data chain");
    NoiseConfig quiet;
    quiet.n_trajectories = 1;
    const NoiseConfig& noise = noise_in ? *noise_in : quiet;

    DetuningScanResult out;
    for (double d : delta_grid) {
        std::vector<DriveSegment> schedule;
        schedule.push_back(
            pulse_with_area(Species::B, omega_mhz, M_PI / 2, 0.0, 0.0, "prep"));
        for (auto& seg : mediated_schedule(omega_mhz, d, Species::B, Species::A))
            schedule.push_back(std::move(seg));
        schedule.push_back(
            pulse_with_area(Species::B, omega_mhz, M_PI / 2, 0.0, 0.0, "readout"));
        QuantumState s = zero_state(chain);
        auto res = evolve_trajectory(std::move(s), schedule, noise, 0, kopt);
        double z1 = expect(res.state, PauliString::single_site(c.n_sites, data[0], PauliOp::Z));
        double z2 = expect(res.state, PauliString::single_site(c.n_sites, data[1], PauliOp::Z));
        out.scan.push_back({d, std::abs(z1 * z2)});
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.scan.size(); ++k)
        if (out.scan[k].cost < out.scan[best].cost) best = k;
    out.delta_star = detail::refine_argmin(out.scan, best);
    return out;
}

} // namespace qca
