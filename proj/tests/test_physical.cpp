#include "doctest.h"

#include <memory>

#include "oracles.hpp"
#include "qca/gate_opt.hpp"
#include "qca/trajectories.hpp"

using namespace qca;

namespace {
std::shared_ptr<const ChainSpec> chain(int n, Species first = Species::A) {
    return std::make_shared<const ChainSpec>(build_alternating_chain(n, 5.3, first));
}

NoiseConfig quiet(int n_traj = 1, std::uint64_t seed = 0) {
    NoiseConfig n;
    n.n_trajectories = n_traj;
    n.seed = seed;
    return n;
}
} // namespace

TEST_CASE("single-atom Rabi oscillation at Omega = 2.9 MHz") {
    auto c = chain(1);
    auto s = zero_state(c);
    // half period 1/(2 Omega): full transfer to |1>
    std::vector<DriveSegment> half = {pi_pulse(Species::A, 2.9, 0.0, 0.0, "pi")};
    auto r1 = evolve_trajectory(s, half, quiet(), 0);
    CHECK(r1.state.populations()[0] == doctest::Approx(1.0).epsilon(1e-8));
    // full 2pi pulse of duration 1/2.9 us returns to |0>
    std::vector<DriveSegment> full = {pulse_with_area(Species::A, 2.9, 2 * M_PI, 0.0, 0.0, "2pi")};
    CHECK(full[0].duration == doctest::Approx(1.0 / 2.9));
    auto r2 = evolve_trajectory(zero_state(c), full, quiet(), 0);
    CHECK(r2.state.populations()[0] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("nearest-neighbor blockade suppresses excitation") {
    auto c = chain(2); // A B at 5.3 um, V ~ 29.9 MHz
    auto s = basis_state(c, "01");
    std::vector<DriveSegment> sched = {pi_pulse(Species::A, 2.9, 0.0, 0.0, "drive")};
    auto r = evolve_trajectory(s, sched, quiet(), 0);
    double v = interaction(*c, 0, 1);
    double bound = std::pow(2.9 / (2 * v), 2) * 4.5; // perturbative scale with margin
    CHECK(r.state.populations()[0] < bound);
    CHECK(r.state.populations()[0] < 0.012);
}

TEST_CASE("zero Rabi frequency freezes populations") {
    auto c = chain(3);
    auto s = basis_state(c, "101");
    DriveSegment idle;
    idle.species = Species::A;
    idle.rabi = 0.0;
    idle.duration = 0.7;
    idle.label = "idle";
    auto r = evolve_trajectory(s, {idle}, quiet(), 0);
    auto p = r.state.populations();
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("noiseless trajectories are seed-independent and unitary") {
    auto c = chain(3);
    auto sched = pxp_schedule(4, 2.9);
    auto a = evolve_trajectory(zero_state(c), sched, quiet(), 1);
    auto b = evolve_trajectory(zero_state(c), sched, quiet(), 99);
    CHECK(overlap2(a.state, b.state) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.jumps.empty());
    CHECK(std::abs(a.state.norm2() - 1.0) < 1e-9);
}

TEST_CASE("noiseless evolution matches a dense matrix-exponential oracle") {
    auto c = chain(2);
    DriveSegment seg = pi_pulse(Species::A, 2.9, 0.8, 0.4, "probe");
    auto tpl = basis_state(c, "01");
    RydbergGenerator gen(tpl, seg, quiet(), FrozenNoise::none(*c));
    // dense generator
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(4, 4);
    for (int col = 0; col < 4; ++col) {
        std::vector<cd> e(4, cd(0, 0)), y;
        e[std::size_t(col)] = 1;
        gen.apply(e, y);
        for (int row = 0; row < 4; ++row) g(row, col) = y[std::size_t(row)];
    }
    Eigen::MatrixXcd u = (cd(0, -seg.duration) * g).exp();
    Eigen::VectorXcd psi(4);
    psi << 0, 1, 0, 0;
    Eigen::VectorXcd want = u * psi;
    auto r = evolve_trajectory(tpl, {seg}, quiet(), 0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r.state.amps[std::size_t(i)] - want(i)) < 1e-8);
}

TEST_CASE("Rydberg lifetime gives exponential survival") {
    auto c = chain(1);
    NoiseConfig noise = quiet(400, 7);
    noise.species[Species::A] = NoiseSpecies{20.0, 0.0, 0.0};
    DriveSegment hold;
    hold.species = Species::A;
    hold.rabi = 0.0;
    hold.duration = 10.0; // t / tau = 0.5
    hold.label = "hold";
    int survived = 0;
    for (int t = 0; t < noise.n_trajectories; ++t) {
        auto r = evolve_trajectory(basis_state(c, "1"), {hold}, noise, std::uint64_t(t));
        if (r.jumps.empty()) ++survived;
    }
    double p = std::exp(-0.5);
    double sigma = std::sqrt(p * (1 - p) / noise.n_trajectories);
    CHECK(std::abs(survived / 400.0 - p) < 3 * sigma);
}

TEST_CASE("trajectory average matches the dense Lindblad oracle on two atoms") {
    auto c = chain(2);
    NoiseConfig noise = quiet(1000, 11);
    noise.species[Species::A] = NoiseSpecies{12.0, 0.05, 0.0};
    noise.species[Species::B] = NoiseSpecies{9.0, 0.08, 0.0};
    DriveSegment seg;
    seg.species = Species::A;
    seg.rabi = 2.9;
    seg.detuning = 0.5;
    seg.duration = 0.55;
    seg.label = "drive";

    // oracle: each atom is a 3-level system with a dark lost state |2>
    using oracle::kron;
    Eigen::MatrixXcd n1 = Eigen::MatrixXcd::Zero(3, 3), x01 = Eigen::MatrixXcd::Zero(3, 3),
                     lost = Eigen::MatrixXcd::Zero(3, 3), proj1 = Eigen::MatrixXcd::Zero(3, 3);
    n1(1, 1) = 1;
    proj1(1, 1) = 1;
    x01(0, 1) = 1;
    x01(1, 0) = 1;
    lost(2, 1) = 1; // |lost><1|
    Eigen::MatrixXcd id3 = Eigen::MatrixXcd::Identity(3, 3);
    double v = interaction(*c, 0, 1);
    Eigen::MatrixXcd h = kTwoPi * (seg.rabi / 2.0) * kron(x01, id3) -
                         kTwoPi * seg.detuning * kron(n1, id3) +
                         kTwoPi * v * kron(n1, n1);
    std::vector<Eigen::MatrixXcd> ls;
    ls.push_back(std::sqrt(1.0 / 12.0) * kron(lost, id3));
    ls.push_back(std::sqrt(1.0 / 9.0) * kron(id3, lost));
    ls.push_back(std::sqrt(2 * 0.05) * kron(proj1, id3));
    ls.push_back(std::sqrt(2 * 0.08) * kron(id3, proj1));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(9, 9);
    rho(4, 4) = 1; // |11>
    rho = oracle::lindblad_rk4(h, ls, rho, seg.duration, 4000);
    double want_n0 = std::real((rho * kron(n1, id3)).trace());
    double want_n1 = std::real((rho * kron(id3, n1)).trace());

    double m0 = 0, m1 = 0, s0 = 0, s1 = 0;
    for (int t = 0; t < noise.n_trajectories; ++t) {
        auto r = evolve_trajectory(basis_state(c, "11"), {seg}, noise, std::uint64_t(t));
        auto p = r.state.populations();
        m0 += p[0];
        m1 += p[1];
        s0 += p[0] * p[0];
        s1 += p[1] * p[1];
    }
    int n = noise.n_trajectories;
    m0 /= n;
    m1 /= n;
    double se0 = std::sqrt((s0 / n - m0 * m0) / (n - 1));
    double se1 = std::sqrt((s1 / n - m1 * m1) / (n - 1));
    CHECK(std::abs(m0 - want_n0) < 3 * se0 + 1e-3);
    CHECK(std::abs(m1 - want_n1) < 3 * se1 + 1e-3);
}

TEST_CASE("norm is monotonically non-increasing under H_eff") {
    auto c = chain(2);
    NoiseConfig noise = quiet(1, 3);
    noise.species[Species::A] = NoiseSpecies{15.0, 0.1, 0.0};
    noise.species[Species::B] = NoiseSpecies{15.0, 0.1, 0.0};
    DriveSegment seg = pi_pulse(Species::A, 2.9, 0.0, 0.0, "drive");
    auto tpl = basis_state(c, "11");
    RydbergGenerator gen(tpl, seg, noise, FrozenNoise::none(*c));
    double prev = 1.0;
    for (int k = 1; k <= 10; ++k) {
        std::vector<cd> v = tpl.amps;
        expv_inplace(gen, v, seg.duration * k / 10.0);
        double n2 = 0;
        for (auto& a : v) n2 += std::norm(a);
        CHECK(n2 <= prev + 1e-10);
        prev = n2;
    }
}

TEST_CASE("energy is conserved for a closed time-independent segment") {
    auto c = chain(4);
    DriveSegment seg = pi_pulse(Species::A, 2.9, 0.3, 0.2, "drive");
    seg.duration = 1.3;
    auto s = basis_state(c, "0101");
    RydbergGenerator gen(s, seg, quiet(), FrozenNoise::none(*c));
    double e0 = gen.hermitian_expectation(s.amps);
    std::vector<cd> v = s.amps;
    expv_inplace(gen, v, seg.duration);
    double e1 = 0;
    {
        std::vector<cd> y;
        gen.apply(v, y);
        cd acc = 0;
        for (std::size_t i = 0; i < v.size(); ++i) acc += std::conj(v[i]) * y[i];
        e1 = acc.real();
    }
    double scale = kTwoPi * (interaction(*c, 0, 1) * 3 + 2.9 * 4);
    CHECK(std::abs(e1 - e0) < 1e-6 * scale);
}

TEST_CASE("strong blockade converges to the ideal PXP pulse") {
    auto base = build_alternating_chain(5, 5.3, Species::A);
    for (auto& [k, v] : base.c6) v *= 100.0;
    auto c = std::make_shared<const ChainSpec>(base);
    NoiseConfig noise = quiet();
    noise.interaction_range = 1; // nearest neighbor only
    auto sched = pxp_schedule(6, 2.9);
    auto phys = evolve_trajectory(zero_state(c), sched, noise, 0);

    auto ideal = zero_state(c);
    run_pxp_automaton(ideal, 6, M_PI);
    CHECK(overlap2(phys.state, ideal) >= 0.999);
}

TEST_CASE("three-level ladder converges to the two-level model") {
    auto c = chain(2);
    auto sched = pxp_schedule(2, 2.9);
    NoiseConfig n2 = quiet();
    auto two = evolve_trajectory(zero_state(c, 2), sched, n2, 0);

    auto run3 = [&](double scale) {
        NoiseConfig n3 = quiet();
        n3.intermediate[Species::A] = IntermediateState{true, 2.3 * scale, 0.0, 0.0, 0.0};
        n3.intermediate[Species::B] = IntermediateState{true, -4.3 * scale, 0.0, 0.0, 0.0};
        return evolve_trajectory(zero_state(c, 3), sched, n3, 0);
    };
    auto project = [&](const QuantumState& s3) {
        QuantumState s = zero_state(c, 2);
        for (std::size_t i = 0; i < s.dim(); ++i) {
            int d0 = int(i >> 1) & 1, d1 = int(i) & 1;
            std::size_t i3 = std::size_t(d0 * 2) * 3 + std::size_t(d1 * 2);
            s.amps[i] = s3.amps[i3];
        }
        double nn = std::sqrt(s.norm2());
        for (auto& a : s.amps) a /= nn;
        return s;
    };
    auto far = run3(10.0);
    CHECK(overlap2(project(far.state), two.state) >= 0.999);
    // and the x10 detuning is closer to the 2-level limit than x1
    auto near = run3(1.0);
    CHECK(1 - overlap2(project(far.state), two.state) <
          1 - overlap2(project(near.state), two.state) + 1e-9);
}

TEST_CASE("jumps are deterministic given the trajectory seed") {
    auto c = chain(2);
    NoiseConfig noise = quiet(1, 21);
    noise.species[Species::A] = NoiseSpecies{3.0, 0.2, 0.0};
    noise.species[Species::B] = NoiseSpecies{3.0, 0.2, 0.0};
    auto sched = pxp_schedule(6, 2.9);
    auto a = evolve_trajectory(basis_state(c, "10"), sched, noise, 5);
    auto b = evolve_trajectory(basis_state(c, "10"), sched, noise, 5);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        CHECK(a.jumps[k].time == b.jumps[k].time);
        CHECK(a.jumps[k].site == b.jumps[k].site);
        CHECK(a.jumps[k].channel == b.jumps[k].channel);
    }
    CHECK(overlap2(a.state, b.state) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run_trajectories aggregates deterministically") {
    auto c = chain(3);
    NoiseConfig noise = quiet(8, 17);
    noise.species[Species::A] = NoiseSpecies{5.0, 0.1, 0.01};
    noise.species[Species::B] = NoiseSpecies{5.0, 0.1, 0.01};
    noise.position_sigma_um = 0.1;
    auto sched = pxp_schedule(4, 2.9);
    RunOptions opt;
    opt.samples_per_step_per_traj = 3;
    auto a = run_trajectories(zero_state(c), sched, noise, opt);
    opt.n_threads = 2;
    auto b = run_trajectories(zero_state(c), sched, noise, opt);
    REQUIRE(a.mean_populations.size() == b.mean_populations.size());
    for (std::size_t st = 0; st < a.mean_populations.size(); ++st)
        for (std::size_t j = 0; j < a.mean_populations[st].size(); ++j)
            CHECK(a.mean_populations[st][j] == b.mean_populations[st][j]);
    for (std::size_t st = 0; st < a.shots_per_step.size(); ++st)
        CHECK(a.shots_per_step[st].bitstrings == b.shots_per_step[st].bitstrings);
}

TEST_CASE("mediated detuning optimization, ideal engine") {
    auto c = chain(3, Species::B);
    std::vector<double> grid;
    for (double d = 0.1; d <= 1.6; d += 0.05) grid.push_back(d);
    SUBCASE("phi = 0 gives delta* = 1/sqrt(3)") {
        auto res = optimize_mediated_detuning_ideal(c, grid, 0.0);
        CHECK(res.delta_star == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.02));
    }
    SUBCASE("single-point grid returns that point") {
        auto res = optimize_mediated_detuning_ideal(c, {0.9}, 0.0);
        CHECK(res.delta_star == doctest::Approx(0.9));
    }
    SUBCASE("empty grid is rejected") {
        CHECK_THROWS_AS(optimize_mediated_detuning_ideal(c, {}, 0.0), std::invalid_argument);
    }
}
