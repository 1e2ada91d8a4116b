#include "doctest.h"

#include <memory>

#include "oracles.hpp"
#include "qca/pipelines.hpp"
#include "qca/quasiparticle.hpp"

using namespace qca;

namespace {
std::shared_ptr<const ChainSpec> chain(int n) {
    return std::make_shared<const ChainSpec>(build_alternating_chain(n, 5.3, Species::A));
}
} // namespace

TEST_CASE("detector examples") {
    auto r = detect("10100001010");
    CHECK(r.q == 2);
    CHECK(r.positions == std::vector<int>{4, 6});
    CHECK(detect("00000000000").q == 0);
    CHECK(detect("01010101010").q == 0);
    CHECK(detect("00001000000").q == 2); // lost atom in vacuum reads as two walls
    CHECK_THROWS_AS(detect("010"), std::invalid_argument);
    CHECK_THROWS_AS(detect("01021"), std::invalid_argument);
}

TEST_CASE("detector matches the pattern-scan oracle on all 11-bit strings") {
    for (int code = 0; code < (1 << 11); ++code) {
        std::string bits(11, '0');
        for (int j = 0; j < 11; ++j)
            if (code & (1 << j)) bits[std::size_t(j)] = '1';
        auto rec = detect(bits);
        auto want = oracle::qp_pattern_scan(bits);
        CHECK(rec.positions == want);
        CHECK(rec.q == int(want.size()));
        for (std::size_t k = 1; k < rec.positions.size(); ++k)
            CHECK(rec.positions[k] > rec.positions[k - 1]);
    }
}

TEST_CASE("Q is conserved under the ideal pi-pulse automaton") {
    auto c = chain(11);
    CounterRng rng(5, 0);
    for (int trial = 0; trial < 6; ++trial) {
        // random blockade-respecting computational state
        std::string bits(11, '0');
        for (int j = 0; j < 11; ++j) {
            bool left = j > 0 && bits[std::size_t(j - 1)] == '1';
            if (!left && rng.uniform() < 0.4) bits[std::size_t(j)] = '1';
        }
        auto s = basis_state(c, bits);
        double q0 = mean_q_exact(s);
        for (int t = 0; t < 9; ++t) {
            Species sp = (t % 2 == 0) ? Species::A : Species::B;
            pxp_pulse(s, PxpStep{sp, M_PI, 0.0});
            CHECK(mean_q_exact(s) == doctest::Approx(q0).epsilon(1e-9));
        }
    }
}

TEST_CASE("single-wall histogram shows 1/3 velocity and reflection") {
    auto c = chain(11);
    // vacuum on the left, Z2-odd on the right: one wall near the middle
    auto s = basis_state(c, "00000101010");
    std::vector<ShotEnsemble> per_step;
    std::vector<int> exact_peak;
    per_step.push_back(sample(s, 200, 1));
    exact_peak.push_back(detect("00000101010").positions.at(0));
    std::string classical = "00000101010";
    for (int t = 0; t < 21; ++t) {
        Species sp = (t % 2 == 0) ? Species::A : Species::B;
        pxp_pulse(s, PxpStep{sp, M_PI, 0.0});
        classical = classical_pxp_pulse(*c, classical, sp);
        per_step.push_back(sample(s, 200, std::uint64_t(t + 2)));
        auto rec = detect(classical);
        REQUIRE(rec.q == 1);
        exact_peak.push_back(rec.positions.front());
    }
    auto hist = position_histogram(per_step, 1);
    REQUIRE(hist.size() == per_step.size());
    for (std::size_t t = 0; t < hist.size(); ++t) {
        REQUIRE_FALSE(hist[t].empty);
        int peak = -1, best = -1;
        for (auto [pos, cnt] : hist[t].counts)
            if (cnt > best) {
                best = cnt;
                peak = pos;
            }
        CHECK(peak == exact_peak[t]);
    }
    // free-flight moves take three pulses; the reflection turn is quicker
    std::vector<int> moves;
    for (std::size_t t = 1; t < exact_peak.size(); ++t)
        if (exact_peak[t] != exact_peak[t - 1]) moves.push_back(int(t));
    for (std::size_t k = 1; k < moves.size(); ++k) {
        int gap = moves[k] - moves[k - 1];
        CHECK((gap == 3 || gap == 2));
    }
    int direction_changes = 0, sign0 = 0;
    for (std::size_t t = 1; t < exact_peak.size(); ++t) {
        int d = exact_peak[t] - exact_peak[t - 1];
        if (d != 0) {
            if (sign0 == 0) sign0 = d;
            else if ((d > 0) != (sign0 > 0)) {
                ++direction_changes;
                sign0 = d;
            }
        }
    }
    CHECK(direction_changes >= 1);
}

TEST_CASE("two-wall run keeps Q = 2 and matches the classical trajectory") {
    auto c = chain(11);
    std::string bits = "10100001010";
    auto s = basis_state(c, bits);
    std::string classical = bits;
    for (int t = 0; t < 12; ++t) {
        Species sp = (t % 2 == 0) ? Species::A : Species::B;
        pxp_pulse(s, PxpStep{sp, M_PI, 0.0});
        classical = classical_pxp_pulse(*c, classical, sp);
        auto e = sample(s, 8, std::uint64_t(t));
        for (const auto& b : e.bitstrings) CHECK(b == classical);
        CHECK(detect(classical).q == 2);
    }
}

TEST_CASE("all-vacuum shots give empty conditioned histograms") {
    ShotEnsemble vac;
    vac.bitstrings.assign(50, std::string(11, '0'));
    auto hist = position_histogram({vac, vac}, 1);
    for (const auto& h : hist) {
        CHECK(h.empty);
        CHECK(h.n_conditioned == 0);
    }
}

TEST_CASE("staggered magnetization") {
    auto c = chain(11);
    SUBCASE("definition on basis patterns") {
        CHECK(staggered_magnetization(*c, basis_state(c, "10101010101").populations()) ==
              doctest::Approx(1.0));
        CHECK(staggered_magnetization(*c, std::vector<double>(11, 0.0)) == doctest::Approx(0.0));
    }
    SUBCASE("ideal orbit sequence per pulse") {
        auto s = zero_state(c);
        auto trace = run_pxp_automaton(s, 12, M_PI);
        std::vector<double> expected = {1, 1, 0, -1, -1, 0, 1, 1, 0, -1, -1, 0};
        for (int t = 1; t <= 12; ++t)
            CHECK(staggered_magnetization(*c, trace[std::size_t(t)]) ==
                  doctest::Approx(expected[std::size_t(t - 1)]).epsilon(1e-10));
    }
    SUBCASE("damped orbit fit recovers a synthetic decay constant") {
        std::vector<double> t, m;
        for (int k = 1; k <= 48; ++k) {
            t.push_back(k);
            m.push_back(0.97 * std::exp(-k / 85.0) * classical_staggered_orbit(k));
        }
        auto fit = fit_damped_orbit(t, m);
        CHECK(fit.tau == doctest::Approx(85.0).epsilon(1e-4));
        CHECK(fit.amplitude == doctest::Approx(0.97).epsilon(1e-4));
    }
    SUBCASE("ensemble overload matches populations") {
        auto s = basis_state(c, "10101010101");
        auto e = sample(s, 100, 3);
        CHECK(staggered_magnetization(*c, e) == doctest::Approx(1.0));
    }
}

TEST_CASE("quasiparticle growth") {
    auto c = chain(9);
    SUBCASE("theta = pi keeps the retained steps at zero") {
        auto s = zero_state(c);
        std::vector<ShotEnsemble> per_pulse;
        per_pulse.push_back(sample(s, 64, 11));
        for (int t = 0; t < 8; ++t) {
            Species sp = (t % 2 == 0) ? Species::A : Species::B;
            pxp_pulse(s, PxpStep{sp, M_PI, 0.0});
            per_pulse.push_back(sample(s, 64, std::uint64_t(20 + t)));
        }
        auto growth = quasiparticle_growth(per_pulse);
        for (const auto& g : growth) {
            if (!g.retained) continue;
            CHECK(g.mean_q == doctest::Approx(0.0));
        }
        CHECK_FALSE(growth[3].retained);
        CHECK_FALSE(growth[6].retained);
        CHECK(growth[4].retained);
    }
    SUBCASE("larger angle deviations proliferate faster (exact)") {
        double prev = -1;
        for (double frac : {1.0, 1.1, 1.2}) {
            auto s = zero_state(c);
            for (int t = 0; t < 8; ++t) {
                Species sp = (t % 2 == 0) ? Species::A : Species::B;
                pxp_pulse(s, PxpStep{sp, frac * M_PI, 0.0});
            }
            double q = mean_q_exact(s);
            CHECK(q > prev);
            prev = q;
        }
    }
}
