#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qca/hamiltonian.hpp"
#include "qca/krylov.hpp"
#include "qca/spam.hpp"
#include "qca/statevec.hpp"

namespace qca {

// Quantum-trajectories (Monte Carlo wave function) evolution of a pulse
// schedule. Between jumps the state evolves under
// H_eff = H - (i/2) sum L^dag L; a jump fires when the squared norm crosses
// a pre-drawn uniform threshold, located by bisection.

class NumericalFailure : public std::runtime_error {
  public:
    explicit NumericalFailure(const std::string& segment, const std::string& what)
        : std::runtime_error("numerical failure in segment '" + segment + "': " + what) {}
};

struct JumpRecord {
    double time = 0; // us, global
    int site = -1;
    char channel = '?'; // 'd' decay, 'p' dephasing, 'e' scattering
};

struct TrajectoryResult {
    QuantumState state;
    std::vector<JumpRecord> jumps;
};

namespace detail {

inline double norm2_of(const std::vector<cd>& v) {
    double s = 0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

// Apply one jump channel: project onto the source level; decay channels
// additionally move the atom to |0> and mark it lost.
inline void apply_jump(QuantumState& s, const JumpChannel& ch) {
    const std::size_t str = s.strides[std::size_t(ch.site)];
    const int dm = s.local_dims[std::size_t(ch.site)];
    const std::size_t src = std::size_t(ch.source_digit);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        std::size_t digit = (i / str) % std::size_t(dm);
        if (digit != src) {
            s.amps[i] = 0;
        } else if (ch.removes_atom && src != 0) {
            s.amps[i - str * src] = s.amps[i];
            s.amps[i] = 0;
        }
    }
    if (ch.removes_atom) s.lost[std::size_t(ch.site)] = 1;
    s.normalize();
}

} // namespace detail

// Integrate one segment with jump detection. `time` is advanced in place.
inline void evolve_segment(QuantumState& s, const DriveSegment& seg, const NoiseConfig& noise,
                           const FrozenNoise& frozen, CounterRng& rng, double& threshold,
                           double& time, std::vector<JumpRecord>& jumps,
                           const KrylovOptions& kopt) {
    double remaining = seg.duration;
    if (remaining <= 0) return;
    int guard = 0;
    while (remaining > 1e-12 * seg.duration) {
        if (++guard > 10000)
            throw NumericalFailure(seg.label, "jump loop did not converge");
        RydbergGenerator gen(s, seg, noise, frozen);
        // try the whole remaining window, bisect if the threshold is crossed
        std::vector<cd> trial = s.amps;
        try {
            expv_inplace(gen, trial, remaining, kopt);
        } catch (const std::exception& e) {
            throw NumericalFailure(seg.label, e.what());
        }
        if (detail::norm2_of(trial) >= threshold) {
            s.amps = std::move(trial);
            time += remaining;
            remaining = 0;
            break;
        }
        // bisection for the jump time to 1e-6 relative accuracy
        double lo = 0, hi = remaining;
        for (int it = 0; it < 60 && (hi - lo) > 1e-6 * seg.duration; ++it) {
            double mid = 0.5 * (lo + hi);
            std::vector<cd> probe = s.amps;
            expv_inplace(gen, probe, mid, kopt);
            if (detail::norm2_of(probe) >= threshold)
                lo = mid;
            else
                hi = mid;
        }
        std::vector<cd> at_jump = s.amps;
        expv_inplace(gen, at_jump, hi, kopt);
        s.amps = std::move(at_jump);
        time += hi;
        remaining -= hi;

        // channel selection proportional to <L^dag L>
        const auto& chans = gen.channels();
        std::vector<double> w(chans.size());
        double tot = 0;
        for (std::size_t k = 0; k < chans.size(); ++k) {
            w[k] = gen.channel_weight(s.amps, chans[k]);
            tot += w[k];
        }
        if (tot <= 0) throw NumericalFailure(seg.label, "jump fired with zero channel weight");
        double u = rng.uniform() * tot;
        std::size_t pick = 0;
        for (; pick + 1 < chans.size(); ++pick) {
            if (u < w[pick]) break;
            u -= w[pick];
        }
        jumps.push_back({time, chans[pick].site, chans[pick].kind});
        detail::apply_jump(s, chans[pick]);
        threshold = rng.uniform_open();
    }
}

// Evolve a full schedule for one trajectory. Frozen (shot-to-shot) noise is
// sampled once from the trajectory stream; everything is a deterministic
// function of (noise.seed, traj_seed).
inline TrajectoryResult evolve_trajectory(QuantumState s,
                                          const std::vector<DriveSegment>& schedule,
                                          const NoiseConfig& noise, std::uint64_t traj_seed,
                                          const KrylovOptions& kopt = {}) {
    noise.validate();
    CounterRng rng(rng_mix(noise.seed, 0x7472616aull /* "traj" */), traj_seed);
    FrozenNoise frozen = FrozenNoise::sample(*s.chain, noise, rng);
    TrajectoryResult out{std::move(s), {}};
    double threshold = rng.uniform_open();
    double time = 0;
    for (const auto& seg : schedule)
        evolve_segment(out.state, seg, noise, frozen, rng, threshold, time, out.jumps, kopt);
    out.state.normalize();
    return out;
}

// Segment-resolved variant: returns the per-site populations after every
// segment (row 0 = initial state).
inline TrajectoryResult evolve_trajectory_recorded(QuantumState s,
                                                   const std::vector<DriveSegment>& schedule,
                                                   const NoiseConfig& noise,
                                                   std::uint64_t traj_seed,
                                                   std::vector<std::vector<double>>* pops,
                                                   std::vector<ShotEnsemble>* shots,
                                                   int samples_per_step,
                                                   const KrylovOptions& kopt = {}) {
    noise.validate();
    CounterRng rng(rng_mix(noise.seed, 0x7472616aull), traj_seed);
    FrozenNoise frozen = FrozenNoise::sample(*s.chain, noise, rng);
    TrajectoryResult out{std::move(s), {}};
    double threshold = rng.uniform_open();
    double time = 0;
    if (pops) pops->push_back(out.state.populations());
    if (shots && samples_per_step > 0) {
        auto e = sample(out.state, samples_per_step, rng.next_u64());
        e.meta.time_step = 0;
        shots->push_back(std::move(e));
    }
    int step = 0;
    for (const auto& seg : schedule) {
        evolve_segment(out.state, seg, noise, frozen, rng, threshold, time, out.jumps, kopt);
        ++step;
        out.state.normalize();
        if (pops) pops->push_back(out.state.populations());
        if (shots && samples_per_step > 0) {
            auto e = sample(out.state, samples_per_step, rng.next_u64());
            e.meta.time_step = step;
            shots->push_back(std::move(e));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// experiment driver: n_trajectories in parallel, deterministic aggregation

struct ExperimentData {
    std::vector<std::vector<double>> mean_populations;   // [step][site]
    std::vector<std::vector<double>> stderr_populations; // [step][site]
    std::vector<ShotEnsemble> shots_per_step;            // merged over trajectories
    int n_trajectories = 0;
};

struct RunOptions {
    int samples_per_step_per_traj = 0;
    bool apply_spam = false;
    SpamParams spam;
    int n_threads = 1;
    KrylovOptions krylov;
};

// Forward SPAM noising of a sampled bitstring, per-site stochastic map.
inline std::string spam_noise_bits(const std::string& bits, const ChainSpec& chain,
                                   const SpamParams& params, CounterRng& rng) {
    std::string out = bits;
    for (int j = 0; j < chain.n_sites; ++j) {
        auto a = single_atom_map(params, chain.species_of(j));
        int truth = bits[std::size_t(j)] == '1';
        double p1 = a[1][std::size_t(truth)];
        out[std::size_t(j)] = rng.uniform() < p1 ? '1' : '0';
    }
    return out;
}

inline ExperimentData run_trajectories(const QuantumState& initial,
                                       const std::vector<DriveSegment>& schedule,
                                       const NoiseConfig& noise, const RunOptions& opt = {}) {
    noise.validate();
    const int n_traj = noise.n_trajectories;
    const int n_steps = static_cast<int>(schedule.size()) + 1;
    const int n_sites = initial.n_sites();

    std::vector<std::vector<std::vector<double>>> pops; // [traj][step][site]
    pops.resize(std::size_t(n_traj));
    std::vector<std::vector<ShotEnsemble>> shots;
    shots.resize(std::size_t(n_traj));

    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            int t = next.fetch_add(1);
            if (t >= n_traj) break;
            evolve_trajectory_recorded(initial, schedule, noise, std::uint64_t(t),
                                       &pops[std::size_t(t)],
                                       opt.samples_per_step_per_traj > 0 ? &shots[std::size_t(t)]
                                                                         : nullptr,
                                       opt.samples_per_step_per_traj, opt.krylov);
        }
    };
    int n_threads = std::max(1, opt.n_threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentData out;
    out.n_trajectories = n_traj;
    out.mean_populations.assign(std::size_t(n_steps), std::vector<double>(std::size_t(n_sites), 0));
    out.stderr_populations = out.mean_populations;
    for (int st = 0; st < n_steps; ++st)
        for (int j = 0; j < n_sites; ++j) {
            double m = 0, m2 = 0;
            for (int t = 0; t < n_traj; ++t) {
                double v = pops[std::size_t(t)][std::size_t(st)][std::size_t(j)];
                m += v;
                m2 += v * v;
            }
            m /= n_traj;
            out.mean_populations[std::size_t(st)][std::size_t(j)] = m;
            double var = n_traj > 1 ? std::max(0.0, m2 / n_traj - m * m) / (n_traj - 1) : 0.0;
            out.stderr_populations[std::size_t(st)][std::size_t(j)] = std::sqrt(var);
        }

    if (opt.samples_per_step_per_traj > 0) {
        out.shots_per_step.assign(std::size_t(n_steps), ShotEnsemble{});
        for (int st = 0; st < n_steps; ++st) {
            auto& merged = out.shots_per_step[std::size_t(st)];
            merged.meta.time_step = st;
            merged.meta.seed = noise.seed;
            for (int t = 0; t < n_traj; ++t)
                for (auto& b : shots[std::size_t(t)][std::size_t(st)].bitstrings)
                    merged.bitstrings.push_back(b);
        }
        if (opt.apply_spam) {
            for (int st = 0; st < n_steps; ++st) {
                CounterRng rng(rng_mix(noise.seed, 0x7370616dull /* "spam" */),
                               std::uint64_t(st));
                for (auto& b : out.shots_per_step[std::size_t(st)].bitstrings)
                    b = spam_noise_bits(b, *initial.chain, opt.spam, rng);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// schedule builders

// Alternating pi-pulse schedule for the PXP automaton (species A first).
inline std::vector<DriveSegment> pxp_schedule(int n_pulses, double rabi_mhz,
                                              double area_radians = M_PI) {
    std::vector<DriveSegment> out;
    for (int t = 0; t < n_pulses; ++t) {
        Species sp = (t % 2 == 0) ? Species::A : Species::B;
        auto seg = pulse_with_area(sp, rabi_mhz, area_radians, 0.0, 0.0,
                                   "pulse" + std::to_string(t + 1));
        out.push_back(std::move(seg));
    }
    return out;
}

// Mediated echo sequence: detuned aux closed-loop pulse, resonant data pi
// pulse, second aux pulse. delta is in units of omega.
inline std::vector<DriveSegment> mediated_schedule(double omega_mhz, double delta_over_omega,
                                                   Species data, Species aux,
                                                   double data_axis_phase = 0.0) {
    double delta_mhz = delta_over_omega * omega_mhz;
    double f_eff = std::sqrt(omega_mhz * omega_mhz + delta_mhz * delta_mhz);
    DriveSegment u1;
    u1.species = aux;
    u1.rabi = omega_mhz;
    u1.detuning = delta_mhz;
    u1.duration = 1.0 / f_eff;
    u1.label = "aux_loop_1";
    DriveSegment flip = pi_pulse(data, omega_mhz, 0.0, data_axis_phase, "data_pi");
    DriveSegment u2 = u1;
    u2.label = "aux_loop_2";
    return {u1, flip, u2};
}

} // namespace qca
