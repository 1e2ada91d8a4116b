#pragma once

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/lattice.hpp"
#include "qca/rng.hpp"
#include "qca/statevec.hpp"

namespace qca {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// One piecewise-constant drive window. Frequencies are ordinary (MHz); the
// 2pi enters only when the generator is assembled. A pi pulse lasts
// 1/(2 Omega).
struct DriveSegment {
    Species species = Species::A;
    double rabi = 0.0;       // two-photon Omega, MHz
    double detuning = 0.0;   // two-photon Delta, MHz
    double axis_phase = 0.0; // radians
    double duration = 0.0;   // us
    std::set<int> mask;      // AOD-shifted sites excluded from the drive
    double mask_light_shift = 35.0; // MHz added to |1> on masked sites
    std::string label;

    void validate() const {
        if (duration < 0) throw std::invalid_argument("DriveSegment: duration must be >= 0");
        if (rabi < 0) throw std::invalid_argument("DriveSegment: rabi must be >= 0");
    }
};

inline DriveSegment pi_pulse(Species sp, double rabi_mhz, double detuning = 0.0,
                             double axis_phase = 0.0, std::string label = {}) {
    DriveSegment s;
    s.species = sp;
    s.rabi = rabi_mhz;
    s.detuning = detuning;
    s.axis_phase = axis_phase;
    s.duration = 1.0 / (2.0 * rabi_mhz);
    s.label = std::move(label);
    return s;
}

inline DriveSegment pulse_with_area(Species sp, double rabi_mhz, double area_radians,
                                    double detuning = 0.0, double axis_phase = 0.0,
                                    std::string label = {}) {
    DriveSegment s = pi_pulse(sp, rabi_mhz, detuning, axis_phase, std::move(label));
    s.duration = area_radians / (2.0 * M_PI * rabi_mhz);
    return s;
}

// Per-species noise parameters. Rates are in 1/us. The dephasing default
// treats each laser's frequency noise as white with one-sided PSD S_f and
// combines the two legs: Gamma_phi = pi^2 (S_blue + S_ir). The A-species
// blue laser runs well above the 1e4 Hz^2/Hz floor, the rest sit near it;
// the normalization and the levels stay configurable.
struct NoiseSpecies {
    double rydberg_lifetime = 0.0; // us; 0 disables decay
    double dephasing_rate = 0.0;   // 1/us on |1>
    double intensity_sigma = 0.0;  // relative shot-to-shot Omega spread
};

struct IntermediateState {
    bool enabled = false;
    double detuning_ghz = 0.0;   // signed
    double linewidth_mhz = 0.0;  // decay rate / 2pi
    // single-photon legs; when zero, symmetric legs sqrt(2 delta Omega) are
    // derived so the two-photon light shifts cancel
    double rabi_blue = 0.0;
    double rabi_ir = 0.0;
};

struct NoiseConfig {
    std::map<Species, NoiseSpecies> species;
    std::map<Species, IntermediateState> intermediate;
    double position_sigma_um = 0.0; // per axis, per shot
    int n_trajectories = 1;
    std::uint64_t seed = 0;
    // extra constant drive detuning error per species (MHz), e.g. the NNN
    // van der Waals scale
    std::map<Species, double> detuning_error;
    int interaction_range = 0; // in sites; 0 = all pairs

    void validate() const {
        if (n_trajectories < 1)
            throw std::invalid_argument("NoiseConfig: n_trajectories must be >= 1");
        for (const auto& [sp, n] : species) {
            (void)sp;
            if (n.rydberg_lifetime < 0 || n.dephasing_rate < 0 || n.intensity_sigma < 0)
                throw std::invalid_argument("NoiseConfig: rates must be >= 0");
        }
        if (position_sigma_um < 0)
            throw std::invalid_argument("NoiseConfig: position sigma must be >= 0");
    }

    const NoiseSpecies& of(Species sp) const {
        static const NoiseSpecies zero{};
        auto it = species.find(sp);
        return it == species.end() ? zero : it->second;
    }
    const IntermediateState& inter(Species sp) const {
        static const IntermediateState off{};
        auto it = intermediate.find(sp);
        return it == intermediate.end() ? off : it->second;
    }
    double detuning_err(Species sp) const {
        auto it = detuning_error.find(sp);
        return it == detuning_error.end() ? 0.0 : it->second;
    }
};

// Paper-level defaults for the full noise model.
inline NoiseConfig default_noise_config() {
    NoiseConfig n;
    const double pi2 = M_PI * M_PI;
    const double deph_a = pi2 * (3e4 + 1e4) * 1e-6; // noisy blue leg + ir, 1/us
    const double deph_b = pi2 * (1e4 + 1e4) * 1e-6;
    // two-photon Rabi noise: half the quadrature sum of the two lasers'
    // intensity spreads (Omega ~ sqrt(I_blue I_ir))
    n.species[Species::A] = NoiseSpecies{100.0, deph_a, 0.5 * std::hypot(0.014, 0.003)};
    n.species[Species::B] = NoiseSpecies{100.0, deph_b, 0.5 * std::hypot(0.005, 0.005)};
    n.intermediate[Species::A] = IntermediateState{true, 2.3, 1.4, 109.0, 120.0};
    n.intermediate[Species::B] = IntermediateState{true, -4.3, 1.2, 124.0, 209.0};
    n.position_sigma_um = 0.1;
    n.n_trajectories = 100;
    return n;
}

// Shot-frozen noise: sampled once per trajectory.
struct FrozenNoise {
    std::vector<std::array<double, 3>> position_offset; // um, per site
    std::map<Species, double> omega_scale;              // multiplicative

    static FrozenNoise sample(const ChainSpec& chain, const NoiseConfig& cfg, CounterRng& rng) {
        FrozenNoise f;
        f.position_offset.assign(std::size_t(chain.n_sites), {0, 0, 0});
        for (int j = 0; j < chain.n_sites; ++j)
            for (int ax = 0; ax < 3; ++ax)
                f.position_offset[std::size_t(j)][std::size_t(ax)] =
                    cfg.position_sigma_um * rng.normal();
        for (Species sp : {Species::A, Species::B})
            f.omega_scale[sp] = 1.0 + cfg.of(sp).intensity_sigma * rng.normal();
        return f;
    }

    static FrozenNoise none(const ChainSpec& chain) {
        FrozenNoise f;
        f.position_offset.assign(std::size_t(chain.n_sites), {0, 0, 0});
        f.omega_scale[Species::A] = 1.0;
        f.omega_scale[Species::B] = 1.0;
        return f;
    }
};

// ---------------------------------------------------------------------------
// matrix-free generator  G = 2pi H - (i/2) sum_k L_k^dag L_k

// Jump channels are diagonal in the computational basis:
//   'd'  Rydberg decay out of the manifold (from |1>)
//   'p'  dephasing (projects onto |1>)
//   'e'  intermediate-state scattering out of the manifold (from |e>),
//        or, in the 2-level effective model, from |0>/|1> during the drive
struct JumpChannel {
    int site = 0;
    char kind = 'd';
    int source_digit = 1; // digit whose population feeds the jump
    double rate = 0.0;    // 1/us
    bool removes_atom = true;
};

class RydbergGenerator {
  public:
    RydbergGenerator(const QuantumState& tpl, const DriveSegment& seg, const NoiseConfig& noise,
                     const FrozenNoise& frozen) {
        seg.validate();
        const ChainSpec& chain = *tpl.chain;
        n_ = tpl.n_sites();
        dims_ = tpl.local_dims;
        strides_ = tpl.strides;
        dim_ = tpl.dim();
        const bool three_level = dims_.front() == 3;
        const auto& inter = noise.inter(seg.species);

        // drive couplings per site
        drive_sites_.clear();
        for (int j : chain.sites_of(seg.species)) {
            if (tpl.lost[std::size_t(j)]) continue;
            if (seg.mask.count(j)) continue;
            double omega = seg.rabi * frozen.omega_scale.at(seg.species);
            if (three_level && inter.enabled) {
                double delta_mhz = inter.detuning_ghz * 1e3;
                double ob = inter.rabi_blue, oi = inter.rabi_ir;
                if (ob <= 0 || oi <= 0) ob = oi = std::sqrt(std::abs(2.0 * delta_mhz * omega));
                // rescale legs so the effective two-photon rate matches omega;
                // a red intermediate detuning flips the effective coupling
                // sign, absorbed into the blue-leg phase
                double eff = ob * oi / (2.0 * std::abs(delta_mhz));
                double fix = eff > 0 ? std::sqrt(omega / eff) : 1.0;
                double sign = delta_mhz < 0 ? -1.0 : 1.0;
                drive_sites_.push_back(
                    {j, sign * kTwoPi * ob * fix / 2.0 * std::exp(cd(0, seg.axis_phase)),
                     kTwoPi * oi * fix / 2.0, true});
            } else {
                drive_sites_.push_back(
                    {j, kTwoPi * omega / 2.0 * std::exp(cd(0, seg.axis_phase)), cd(0, 0), false});
            }
        }

        // jump channels
        for (int j = 0; j < n_; ++j) {
            if (tpl.lost[std::size_t(j)]) continue;
            Species sp = chain.species_of(j);
            const auto& ns = noise.of(sp);
            int one = dims_[std::size_t(j)] == 2 ? 1 : 2;
            if (ns.rydberg_lifetime > 0)
                channels_.push_back({j, 'd', one, 1.0 / ns.rydberg_lifetime, true});
            if (ns.dephasing_rate > 0)
                channels_.push_back({j, 'p', one, 2.0 * ns.dephasing_rate, false});
            const auto& in_j = noise.inter(sp);
            if (in_j.enabled) {
                double gamma_e = kTwoPi * in_j.linewidth_mhz;
                if (three_level) {
                    channels_.push_back({j, 'e', 1, gamma_e, true});
                } else if (sp == seg.species && !seg.mask.count(j) && seg.rabi > 0) {
                    // effective 2-level scattering from both legs during drive
                    double delta_mhz = std::abs(in_j.detuning_ghz) * 1e3;
                    double ob = in_j.rabi_blue, oi = in_j.rabi_ir;
                    if (ob <= 0 || oi <= 0)
                        ob = oi = std::sqrt(2.0 * delta_mhz * seg.rabi);
                    double p0 = (ob / (2 * delta_mhz)) * (ob / (2 * delta_mhz));
                    double p1 = (oi / (2 * delta_mhz)) * (oi / (2 * delta_mhz));
                    channels_.push_back({j, 'e', 0, gamma_e * p0, true});
                    channels_.push_back({j, 'e', dims_[std::size_t(j)] == 2 ? 1 : 2,
                                         gamma_e * p1, true});
                }
            }
        }

        build_diagonal(tpl, seg, noise, frozen, three_level && inter.enabled);
    }

    std::size_t dim() const { return dim_; }
    const std::vector<JumpChannel>& channels() const { return channels_; }

    void apply(const std::vector<cd>& x, std::vector<cd>& y) const {
        y.resize(dim_);
        for (std::size_t i = 0; i < dim_; ++i) y[i] = diag_[i] * x[i];
        for (const auto& d : drive_sites_) {
            const std::size_t str = strides_[std::size_t(d.site)];
            const int dm = dims_[std::size_t(d.site)];
            if (!d.ladder) {
                const int one = dm == 2 ? 1 : 2;
                const std::size_t delta = str * std::size_t(one);
                const cd c = d.blue, cc = std::conj(d.blue);
                for (std::size_t i = 0; i < dim_; ++i) {
                    std::size_t digit = (i / str) % std::size_t(dm);
                    if (digit != 0) continue;
                    std::size_t p = i + delta;
                    y[i] += cc * x[p]; // <0|H|1> = e^{-i phase} O/2
                    y[p] += c * x[i];
                }
            } else {
                const cd cb = d.blue, cbb = std::conj(d.blue);
                const cd ci = d.ir, cii = std::conj(d.ir);
                for (std::size_t i = 0; i < dim_; ++i) {
                    std::size_t digit = (i / str) % std::size_t(dm);
                    if (digit == 0) {
                        y[i] += cbb * x[i + str];
                        y[i + str] += cb * x[i];
                    } else if (digit == 1) {
                        y[i] += cii * x[i + str];
                        y[i + str] += ci * x[i];
                    }
                }
            }
        }
    }

    // diagonal expectation of the anti-Hermitian part per channel, used for
    // jump-channel selection
    double channel_weight(const std::vector<cd>& x, const JumpChannel& ch) const {
        const std::size_t str = strides_[std::size_t(ch.site)];
        const int dm = dims_[std::size_t(ch.site)];
        double acc = 0;
        for (std::size_t i = 0; i < dim_; ++i)
            if ((i / str) % std::size_t(dm) == std::size_t(ch.source_digit))
                acc += std::norm(x[i]);
        return ch.rate * acc;
    }

    double hermitian_expectation(const std::vector<cd>& x) const {
        std::vector<cd> y;
        apply(x, y);
        cd acc = 0;
        for (std::size_t i = 0; i < dim_; ++i) acc += std::conj(x[i]) * y[i];
        return acc.real(); // the -i/2 D part is purely imaginary on the diagonal
    }

  private:
    struct DriveSite {
        int site;
        cd blue; // 2pi O/2 e^{i phase} (two-photon in the 2-level model)
        cd ir;   // second leg for the ladder
        bool ladder;
    };

    void build_diagonal(const QuantumState& tpl, const DriveSegment& seg,
                        const NoiseConfig& noise, const FrozenNoise& frozen, bool ladder) {
        const ChainSpec& chain = *tpl.chain;
        diag_.assign(dim_, cd(0, 0));
        // per-site diagonal contributions on each level
        std::vector<std::array<cd, 3>> site_diag(std::size_t(n_), {cd(0, 0), cd(0, 0), cd(0, 0)});
        for (int j = 0; j < n_; ++j) {
            if (tpl.lost[std::size_t(j)]) continue;
            Species sp = chain.species_of(j);
            int one = dims_[std::size_t(j)] == 2 ? 1 : 2;
            double det = 0.0;
            if (sp == seg.species && !seg.mask.count(j))
                det = seg.detuning + noise.detuning_err(sp);
            double shift = seg.mask.count(j) && sp == seg.species ? seg.mask_light_shift : 0.0;
            site_diag[std::size_t(j)][std::size_t(one)] += kTwoPi * (-det + shift);
            if (ladder && dims_[std::size_t(j)] == 3 && sp == seg.species &&
                !seg.mask.count(j)) {
                const auto& in_j = noise.inter(sp);
                site_diag[std::size_t(j)][1] += kTwoPi * (-in_j.detuning_ghz * 1e3);
            }
        }
        for (const auto& ch : channels_)
            site_diag[std::size_t(ch.site)][std::size_t(ch.source_digit)] +=
                cd(0, -0.5 * ch.rate);

        // pairwise interactions at the frozen positions
        std::vector<std::array<double, 3>> pos;
        pos.resize(std::size_t(n_));
        for (int j = 0; j < n_; ++j) {
            pos[std::size_t(j)] = frozen.position_offset[std::size_t(j)];
            pos[std::size_t(j)][0] += j * chain.spacing;
        }
        std::vector<std::pair<std::pair<int, int>, double>> pairs;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                if (noise.interaction_range > 0 && j - i > noise.interaction_range) continue;
                if (tpl.lost[std::size_t(i)] || tpl.lost[std::size_t(j)]) continue;
                double dx = pos[std::size_t(i)][0] - pos[std::size_t(j)][0];
                double dy = pos[std::size_t(i)][1] - pos[std::size_t(j)][1];
                double dz = pos[std::size_t(i)][2] - pos[std::size_t(j)][2];
                double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                double v = interaction_at(chain, i, j, r);
                if (v != 0.0) pairs.push_back({{i, j}, kTwoPi * v});
            }

        for (std::size_t idx = 0; idx < dim_; ++idx) {
            cd acc = 0;
            for (int j = 0; j < n_; ++j) {
                std::size_t digit =
                    (idx / strides_[std::size_t(j)]) % std::size_t(dims_[std::size_t(j)]);
                acc += site_diag[std::size_t(j)][digit];
            }
            diag_[idx] = acc;
        }
        for (const auto& [ij, v] : pairs) {
            int i = ij.first, j = ij.second;
            const std::size_t si = strides_[std::size_t(i)], sj = strides_[std::size_t(j)];
            const int oi = dims_[std::size_t(i)] == 2 ? 1 : 2, oj = dims_[std::size_t(j)] == 2 ? 1 : 2;
            for (std::size_t idx = 0; idx < dim_; ++idx) {
                if ((idx / si) % std::size_t(dims_[std::size_t(i)]) != std::size_t(oi)) continue;
                if ((idx / sj) % std::size_t(dims_[std::size_t(j)]) != std::size_t(oj)) continue;
                diag_[idx] += v;
            }
        }
    }

    int n_ = 0;
    std::size_t dim_ = 0;
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::vector<cd> diag_;
    std::vector<DriveSite> drive_sites_;
    std::vector<JumpChannel> channels_;
};

} // namespace qca
