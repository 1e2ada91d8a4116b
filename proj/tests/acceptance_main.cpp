// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier scenario checks than the unit suite; every tolerance is
// pinned here in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "qca/clifford.hpp"
#include "qca/experiments.hpp"
#include "qca/gate_opt.hpp"
#include "qca/pipelines.hpp"
#include "qca/quasiparticle.hpp"
#include "qca/trajectories.hpp"

using namespace qca;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<const ChainSpec> alt_chain(int n, Species first = Species::A) {
    return std::make_shared<const ChainSpec>(build_alternating_chain(n, 5.3, first));
}
std::shared_ptr<const ChainSpec> uni_chain(int n) {
    return std::make_shared<const ChainSpec>(build_uniform_chain(n, 10.6, Species::B));
}

// ---------------------------------------------------------------------------

void criterion_1_vacuum_orbit() {
    auto t0 = std::chrono::steady_clock::now();
    auto chain = alt_chain(21);
    QuantumState s = zero_state(chain);
    QuantumState vac = s;
    auto trace = run_pxp_automaton(s, 18, M_PI);
    double infidelity = std::abs(1.0 - overlap2(vac, s));
    bool period6 = true;
    for (int t = 0; t + 6 < static_cast<int>(trace.size()); ++t)
        for (int j = 0; j < 21; ++j)
            period6 &= std::abs(trace[std::size_t(t)][std::size_t(j)] -
                                trace[std::size_t(t + 6)][std::size_t(j)]) < 1e-10;
    double dt = seconds_since(t0);
    bool pass = infidelity < 1e-10 && period6 && dt < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "infidelity=%.2e period6=%d runtime=%.2fs", infidelity,
                  int(period6), dt);
    report(1, "vacuum orbit exactness on 21 sites", pass, buf);
}

void criterion_2_quasiparticle_kinematics() {
    // exhaustive detector equivalence over all 2^11 bitstrings
    bool detector_ok = true;
    for (int code = 0; code < (1 << 11); ++code) {
        std::string bits(11, '0');
        for (int j = 0; j < 11; ++j)
            if (code & (1 << j)) bits[std::size_t(j)] = '1';
        auto rec = detect(bits);
        std::vector<int> want;
        if (bits.substr(0, 3) == "001") want.push_back(1);
        for (int j = 2; j <= 9; ++j) {
            std::string w = bits.substr(std::size_t(j - 2), 4);
            if (w == "0001" || w == "1000" || w == "1001") want.push_back(j);
        }
        if (bits.substr(8, 3) == "100") want.push_back(10);
        detector_ok &= rec.positions == want;
    }

    // single-wall run: conditioned histogram peaks match the exact trajectory
    auto chain = alt_chain(11);
    auto s = basis_state(chain, "00000101010");
    std::string classical = "00000101010";
    bool peaks_ok = true;
    std::vector<int> exact_positions = {detect(classical).positions.front()};
    std::vector<ShotEnsemble> per_step = {sample(s, 400, 1)};
    for (int t = 0; t < 21; ++t) {
        Species sp = (t % 2 == 0) ? Species::A : Species::B;
        pxp_pulse(s, PxpStep{sp, M_PI, 0.0});
        classical = classical_pxp_pulse(*chain, classical, sp);
        per_step.push_back(sample(s, 400, std::uint64_t(t) + 2));
        exact_positions.push_back(detect(classical).positions.front());
    }
    auto hist = position_histogram(per_step, 1);
    for (std::size_t t = 0; t < hist.size(); ++t) {
        if (hist[t].empty) {
            peaks_ok = false;
            continue;
        }
        int peak = -1, best = -1;
        for (auto [pos, cnt] : hist[t].counts)
            if (cnt > best) {
                best = cnt;
                peak = pos;
            }
        peaks_ok &= peak == exact_positions[t];
    }
    bool moved = false, reflected = false;
    int dir = 0;
    for (std::size_t t = 1; t < exact_positions.size(); ++t) {
        int d = exact_positions[t] - exact_positions[t - 1];
        if (d != 0) {
            moved = true;
            if (dir != 0 && (d > 0) != (dir > 0)) reflected = true;
            dir = d;
        }
    }
    bool pass = detector_ok && peaks_ok && moved && reflected;
    char buf[160];
    std::snprintf(buf, sizeof buf, "detector=%d peaks=%d reflection=%d", int(detector_ok),
                  int(peaks_ok), int(reflected));
    report(2, "quasiparticle kinematics and detector equivalence", pass, buf);
}

void criterion_3_rotation_scan() {
    auto chain = alt_chain(15);
    std::vector<double> q14;
    double q_pi_max = 0;
    for (double frac : {1.0, 1.1, 1.2}) {
        QuantumState s = zero_state(chain);
        double last = 0;
        for (int t = 0; t < 14; ++t) {
            pxp_pulse(s, {t % 2 == 0 ? Species::A : Species::B, frac * M_PI, 0.0});
            int pulse = t + 1;
            double q = mean_q_exact(s);
            if (pulse == 14) last = q;
            if (frac == 1.0 && pulse % 3 != 0) q_pi_max = std::max(q_pi_max, q);
        }
        q14.push_back(last);
    }
    bool monotone = q14[0] < q14[1] && q14[1] < q14[2];
    bool pass = monotone && q_pi_max < 0.01;
    char buf[160];
    std::snprintf(buf, sizeof buf, "Q14 = %.4f < %.4f < %.4f, max retained Q(pi) = %.2e", q14[0],
                  q14[1], q14[2], q_pi_max);
    report(3, "rotation-angle scan monotonicity on 15 atoms", pass, buf);
}

struct MagnetizationCase {
    const char* name;
    bool noise;
    double err_a, err_b;
    double target, sigma;
};

void criterion_4_magnetization() {
    auto chain = alt_chain(11);
    const int n_pulses = 42;
    // The drive is calibrated onto the NNN-shifted resonance (+0.3/+0.2 MHz);
    // the detuning-error case is that calibration lost to a slow drift.
    const MagnetizationCase cases[] = {
        {"tails only", false, 0.3, 0.2, 141.0, 10.0},
        {"full noise", true, 0.3, 0.2, 68.0, 5.0},
        {"noise + detuning error", true, 0.0, 0.0, 31.0, 2.0},
    };
    for (const auto& cs : cases) {
        auto t0 = std::chrono::steady_clock::now();
        NoiseConfig noise = cs.noise ? default_noise_config() : NoiseConfig{};
        noise.n_trajectories = cs.noise ? 100 : 1;
        noise.seed = 20260808;
        noise.detuning_error[Species::A] = cs.err_a;
        noise.detuning_error[Species::B] = cs.err_b;
        auto sched = pxp_schedule(n_pulses, 2.9);
        RunOptions opt;
        auto data = run_trajectories(zero_state(chain), sched, noise, opt);
        std::vector<double> m;
        for (int t = 1; t <= n_pulses; ++t)
            m.push_back(staggered_magnetization(*chain, data.mean_populations[std::size_t(t)]));
        auto fit = staggered_decay_fit(m);
        double dt = seconds_since(t0);
        bool pass = std::abs(fit.tau - cs.target) <= 2 * cs.sigma && dt < 3600.0;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s: tau=%.1f target=%.0f(%.0f) runtime=%.0fs", cs.name,
                      fit.tau, cs.target, cs.sigma, dt);
        report(4, "staggered magnetization decay", pass, buf);
    }
}

void criterion_5_ghz_growth() {
    auto res = run_ghz_growth_ideal(alt_chain(11), 9);
    bool unit_fidelity = true;
    for (std::size_t k = 0; k < res.reports.size(); ++k) {
        const auto& info = res.schedule[k];
        if (info.single_species && info.support.size() >= 2)
            unit_fidelity &= std::abs(res.reports[k].fidelity - 1.0) < 1e-9;
    }
    bool bound_ok = true;
    for (std::size_t t0 : {std::size_t(0), std::size_t(3)}) {
        auto b = ghz_dual_species_bound(res.reports, t0, res.reports[t0].population_term);
        bound_ok &= b.fidelity <= res.exact_overlap[t0] + 1e-9;
    }
    bool pass = unit_fidelity && bound_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "single-species F=1: %d, dual bound conservative: %d",
                  int(unit_fidelity), int(bound_ok));
    report(5, "GHZ growth fidelity (11 sites)", pass, buf);
}

void criterion_6_mediated_gate() {
    // (a) ideal V layer vs the closed-form echo matrix at alpha = pi/2
    auto chain3 = alt_chain(3, Species::B);
    MediatedLayer layer;
    layer.data_species = Species::B;
    layer.aux_species = Species::A;
    layer.delta = 1.0 / std::sqrt(3.0);
    double frob = 0;
    {
        std::vector<std::vector<cd>> got(4, std::vector<cd>(4));
        for (int col = 0; col < 4; ++col) {
            QuantumState s = zero_state(chain3);
            s.amps.assign(8, cd(0, 0));
            s.amps[std::size_t((col >> 1) * 4 + (col & 1))] = 1;
            mediated_v_layer(s, layer);
            got[0][std::size_t(col)] = s.amps[0];
            got[1][std::size_t(col)] = s.amps[1];
            got[2][std::size_t(col)] = s.amps[4];
            got[3][std::size_t(col)] = s.amps[5];
        }
        auto uphase = [&](int z1, int z2) {
            double phi = 0.0, Phi = M_PI / 2;
            return std::exp(cd(0, (phi - Phi) / 4 * (z1 + z2) + (phi + Phi) / 4 * (z1 * z2)));
        };
        auto zof = [](int b) { return b == 0 ? 1 : -1; };
        std::vector<cd> ref(16, cd(0, 0));
        for (int b = 0; b < 4; ++b) {
            int a = b ^ 3; // X (x) X
            ref[std::size_t(a * 4 + b)] =
                uphase(zof(a >> 1), zof(a & 1)) * uphase(zof(b >> 1), zof(b & 1));
        }
        cd tr = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                tr += std::conj(ref[std::size_t(a * 4 + b)]) * got[std::size_t(a)][std::size_t(b)];
        cd phase = tr / std::abs(tr);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                frob += std::norm(got[std::size_t(a)][std::size_t(b)] -
                                  phase * ref[std::size_t(a * 4 + b)]);
        frob = std::sqrt(frob);
    }

    // (b) physical detuning optimum with the calibrated Cs-Cs coefficient
    auto base = build_alternating_chain(3, 5.3, Species::B);
    base.c6[SpeciesPair(Species::B, Species::B)] = 5.3e5;
    auto chain_phys = std::make_shared<const ChainSpec>(base);
    std::vector<double> grid;
    for (double d = 0.5; d <= 2.0001; d += 0.05) grid.push_back(d);
    auto opt = optimize_mediated_detuning_physical(chain_phys, grid, 2.9);

    // (c) ideal Bell fit
    auto bell = run_bell_ideal(alt_chain(3, Species::B));
    bool fit_ok =
        std::abs(bell.report.fidelity - 1.0) < 1e-9 &&
        std::abs(std::remainder(bell.report.bell_theta_star - 3 * M_PI / 4, 2 * M_PI)) < 1e-6;

    bool pass = frob < 1e-10 && opt.delta_star >= 1.05 && opt.delta_star <= 1.45 && fit_ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "V-layer frob=%.1e, delta*=%.3f, F_C=%.10f, theta*=%.6f pi",
                  frob, opt.delta_star, bell.report.fidelity,
                  bell.report.bell_theta_star / M_PI);
    report(6, "mediated gate algebra and optimization", pass, buf);
}

void criterion_7_cluster() {
    auto gens = graph_step_state_generators(17, 1);
    bool all_one = true;
    for (const auto& s : cluster_stabilizers(17)) all_one &= stabilizer_expectation(gens, s) == 1;

    auto cuni = uni_chain(5);
    QuantumState sv = zero_state(cuni);
    graph_step(sv);
    auto gens5 = graph_step_state_generators(5, 1);
    bool match5 = true;
    for (const auto& stab : cluster_stabilizers(5)) {
        double want = stabilizer_expectation(gens5, stab);
        match5 &= std::abs(expect(sv, stab) - want) < 1e-9;
    }

    auto cmed = alt_chain(9, Species::B);
    auto cluster = run_cluster_ideal(cmed);
    auto data = cmed->sites_of(Species::B);
    std::vector<double> phases(5);
    bool amp_ok = true;
    for (int i = 0; i < 5; ++i) {
        std::vector<double> xs, ys;
        for (int k = 0; k < 24; ++k) {
            double alpha = 2 * M_PI * k / 24;
            xs.push_back(alpha);
            ys.push_back(stabilizer_expectation_exact(cluster, data, i, alpha));
        }
        auto fit = fit_shifted_basis(xs, ys, [](double x) { return std::cos(x); });
        amp_ok &= std::abs(std::abs(fit.amplitude) - 1.0) < 1e-8;
        phases[std::size_t(i)] =
            fit.amplitude > 0 ? fit.shift : std::fmod(fit.shift + M_PI, 2 * M_PI);
    }
    double bulk = phases[2];
    bool shift_ok =
        std::abs(std::abs(std::remainder(phases[0] - bulk, M_PI)) - M_PI / 2) < 1e-6 &&
        std::abs(std::abs(std::remainder(phases[4] - bulk, M_PI)) - M_PI / 2) < 1e-6 &&
        std::abs(std::remainder(phases[1] - bulk, 2 * M_PI)) < 1e-6 &&
        std::abs(std::remainder(phases[3] - bulk, 2 * M_PI)) < 1e-6;

    bool pass = all_one && match5 && amp_ok && shift_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "17q=+1:%d, 5q match:%d, boundary pi/2 shift:%d", int(all_one),
                  int(match5), int(shift_ok));
    report(7, "cluster state stabilizers", pass, buf);
}

void criterion_8_graph_qca() {
    const int n = 6;
    auto traj = glider_trajectory(glider_u(n, 0), 2 * (n + 1), n);
    bool gliders_ok = true;
    for (int k = 0; k <= n; ++k)
        gliders_ok &= traj[std::size_t(k)].family == 'U' && traj[std::size_t(k)].label == k &&
                      std::abs(traj[std::size_t(k)].op.sign - cd(1, 0)) < 1e-12;
    for (int k = 0; k <= n; ++k)
        gliders_ok &= traj[std::size_t(n + 1 + k)].family == 'D' &&
                      traj[std::size_t(n + 1 + k)].label == k;
    gliders_ok &= to_string(traj[std::size_t(n)].op) == "+IIIIIX";
    gliders_ok &= to_string(traj[std::size_t(2 * n + 1)].op) == "+XIIIII";

    auto chain = uni_chain(5);
    QuantumState s = zero_state(chain);
    std::vector<int> data = {0, 1, 2, 3, 4};
    std::vector<double> alphas;
    for (int k = 0; k < 24; ++k) alphas.push_back(2 * M_PI * k / 24);
    double worst = 0;
    for (int t = 0; t <= 5; ++t) {
        if (t > 0) graph_experiment_step(s, t);
        for (const auto& spec : graph_qca_expected_operators(t)) {
            std::vector<double> ys;
            for (double a : alphas) ys.push_back(graph_operator_exact(s, data, spec.label, a));
            double reported;
            if (spec.form == GraphFitForm::kNA) {
                double m = 0;
                for (double v : ys) m += v;
                reported = std::abs(m / double(ys.size()));
            } else {
                auto fit = fit_shifted_basis(alphas, ys, detail::graph_fit_basis(spec.form));
                reported = std::abs(fit.amplitude) + std::abs(fit.offset);
            }
            worst = std::max(worst, std::abs(reported - spec.ideal_max));
        }
    }
    bool pass = gliders_ok && worst < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf, "gliders=%d, operator-table max error=%.2e", int(gliders_ok),
                  worst);
    report(8, "Graph-State automaton gliders and operator table", pass, buf);
}

void criterion_9_spam() {
    auto chain = alt_chain(4, Species::B);
    auto params = default_spam_params();
    double worst_rt = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        CounterRng rng(seed, 9);
        std::vector<double> p(16);
        double tot = 0;
        for (auto& v : p) {
            v = rng.uniform();
            tot += v;
        }
        for (auto& v : p) v /= tot;
        auto corr = spam_correct(spam_forward(p, *chain, params), *chain, params);
        for (std::size_t i = 0; i < p.size(); ++i)
            worst_rt = std::max(worst_rt, std::abs(corr.distribution[i] - p[i]));
    }

    SpamSpeciesParams cs_raw{0.9903, 0.0063, 0.0076, 0.972, 0.959, 0.99};
    SpamSpeciesParams rb_raw{0.9943, 0.0047, 0.0058, 0.987, 0.966, 0.94};
    auto cs = spam_correct_raw(cs_raw);
    auto rb = spam_correct_raw(rb_raw);
    bool table_ok = std::abs(cs.s - 0.979) <= 0.003 && std::abs(cs.d_g - 0.986) <= 0.005 &&
                    std::abs(cs.d_r - 1.00) <= 0.01 && std::abs(rb.s - 0.994) <= 0.007 &&
                    std::abs(rb.d_g - 0.978) <= 0.008 && std::abs(rb.d_r - 0.94) <= 0.01;

    bool stochastic = true;
    for (auto sp : {Species::A, Species::B}) {
        auto a = single_atom_map(params, sp);
        stochastic &= std::abs(a[0][0] + a[1][0] - 1.0) < 1e-12 &&
                      std::abs(a[0][1] + a[1][1] - 1.0) < 1e-12;
    }

    auto chain6 = alt_chain(6, Species::B);
    bool local_ok = true;
    {
        CounterRng rng(3, 4);
        std::vector<double> p(64);
        double tot = 0;
        for (auto& v : p) {
            v = rng.uniform();
            tot += v;
        }
        for (auto& v : p) v /= tot;
        auto meas = spam_forward(p, *chain6, params);
        auto global = spam_correct(meas, *chain6, params).distribution;
        for (int i = 0; i < 6 && local_ok; ++i)
            for (int j = i + 1; j < 6; ++j) {
                std::vector<double> m(4, 0.0);
                for (std::size_t idx = 0; idx < meas.size(); ++idx)
                    m[std::size_t(((idx >> (5 - i)) & 1) * 2 + ((idx >> (5 - j)) & 1))] +=
                        meas[idx];
                auto local = spam_correct_marginal(m, *chain6, {i, j}, params).distribution;
                double zz_local = local[0] - local[1] - local[2] + local[3];
                double zz_global = 0;
                for (std::size_t idx = 0; idx < global.size(); ++idx) {
                    double sgn = (((idx >> (5 - i)) & 1) ? -1.0 : 1.0) *
                                 (((idx >> (5 - j)) & 1) ? -1.0 : 1.0);
                    zz_global += sgn * global[idx];
                }
                local_ok &= std::abs(zz_local - zz_global) < 1e-10;
            }
    }

    bool pass = worst_rt < 1e-10 && table_ok && stochastic && local_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "roundtrip=%.1e table=%d stochastic=%d local=%d", worst_rt,
                  int(table_ok), int(stochastic), int(local_ok));
    report(9, "SPAM model and correction", pass, buf);
}

void criterion_10_cross_engine() {
    auto base = build_alternating_chain(5, 5.3, Species::A);
    for (auto& [k, v] : base.c6) v *= 100.0;
    auto chain = std::make_shared<const ChainSpec>(base);
    NoiseConfig noise;
    noise.n_trajectories = 1;
    noise.interaction_range = 1;
    auto sched = pxp_schedule(6, 2.9);
    std::vector<std::vector<double>> pops;
    evolve_trajectory_recorded(zero_state(chain), sched, noise, 0, &pops, nullptr, 0);
    QuantumState ideal = zero_state(chain);
    auto ideal_trace = run_pxp_automaton(ideal, 6, M_PI);
    double worst_pop = 0;
    for (std::size_t t = 0; t < pops.size(); ++t)
        for (std::size_t j = 0; j < pops[t].size(); ++j)
            worst_pop = std::max(worst_pop, std::abs(pops[t][j] - ideal_trace[t][j]));

    auto cuni = uni_chain(5);
    QuantumState sv = zero_state(cuni);
    double worst_exp = 0;
    for (int t = 0; t <= 3; ++t) {
        if (t > 0) graph_step(sv);
        auto gens = graph_step_state_generators(5, t);
        for (int a = 0; a < 5; ++a)
            for (int oa = 1; oa <= 3; ++oa)
                for (int b = a; b < 5; ++b)
                    for (int ob = 1; ob <= 3; ++ob) {
                        if (b == a && ob != oa) continue;
                        PauliString p = PauliString::identity(5);
                        p.set(a, static_cast<PauliOp>(oa));
                        if (b != a) p.set(b, static_cast<PauliOp>(ob));
                        double want = stabilizer_expectation(gens, p);
                        worst_exp = std::max(worst_exp, std::abs(expect(sv, p) - want));
                    }
    }
    bool pass = worst_pop < 0.01 && worst_exp < 1e-9;
    char buf[160];
    std::snprintf(buf, sizeof buf, "blockade-limit dev=%.2e, graph-step dev=%.2e", worst_pop,
                  worst_exp);
    report(10, "cross-engine coherence", pass, buf);
}

} // namespace

int main() {
    criterion_1_vacuum_orbit();
    criterion_2_quasiparticle_kinematics();
    criterion_3_rotation_scan();
    criterion_4_magnetization();
    criterion_5_ghz_growth();
    criterion_6_mediated_gate();
    criterion_7_cluster();
    criterion_8_graph_qca();
    criterion_9_spam();
    criterion_10_cross_engine();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance check(s) failed\n", g_failures);
    return 1;
}
