#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/fits.hpp"
#include "qca/pauli.hpp"
#include "qca/statevec.hpp"

namespace qca {

// Fidelity estimators and sweep fits: GHZ population/parity bound, the
// dual-species lower bound, Bell coherence machinery, cluster stabilizer
// scans and the Graph-State operator table.

struct ParitySweep {
    std::vector<double> angles; // radians in [0, 2pi)
    std::vector<double> values; // measured B(phi) or r(theta)
    std::vector<double> errors; // optional standard errors (may be empty)
    int n_qubits = 0;           // N of the GHZ/Bell support
};

struct FidelityReport {
    double population_term = 0; // Q or P
    double coherence_term = 0;  // fitted max parity / max W
    double fidelity = 0;
    bool clipped = false;
    bool lower_bound = false;
    bool spam_corrected = false;
    bool fit_warning = false;
    double postselect_fraction = 1.0;
    // parity-fit details
    double parity_amplitude = 0;
    double parity_phase = 0;
    // bell-fit details
    double bell_a = 0, bell_b = 0, bell_theta_star = 0;
};

namespace detail {
inline double clip01(double v, bool* clipped) {
    const double eps = 1e-12; // numerical noise is clamped silently
    if (v < 0) {
        *clipped = v < -eps;
        return 0;
    }
    if (v > 1) {
        *clipped = v > 1 + eps;
        return 1;
    }
    return v;
}
} // namespace detail

// ---------------------------------------------------------------------------
// GHZ

// Q = p(pattern1) + p(pattern2) from Z-basis shots restricted to the target
// sites (indices into the shot bitstrings).
inline double ghz_population(const ShotEnsemble& shots, const std::vector<int>& sites,
                             const std::string& pattern1, const std::string& pattern2) {
    if (shots.bitstrings.empty()) throw std::invalid_argument("ghz_population: empty ensemble");
    if (pattern1.size() != sites.size() || pattern2.size() != sites.size())
        throw std::invalid_argument("ghz_population: pattern/site mismatch");
    std::size_t hit = 0;
    for (const auto& b : shots.bitstrings) {
        bool m1 = true, m2 = true;
        for (std::size_t k = 0; k < sites.size(); ++k) {
            char c = b[std::size_t(sites[k])];
            m1 &= c == pattern1[k];
            m2 &= c == pattern2[k];
        }
        hit += m1 || m2;
    }
    return double(hit) / double(shots.n_shots());
}

// F_GHZ >= Q - 1/2 + max_phi B(phi)/2, with max B estimated from a cosine
// fit with fixed period 2pi/N.
inline FidelityReport ghz_fidelity(double q_population, const ParitySweep& sweep) {
    if (sweep.n_qubits < 1) throw std::invalid_argument("ghz_fidelity: n_qubits must be >= 1");
    if (sweep.angles.size() < 8)
        throw std::invalid_argument("ghz_fidelity: parity sweep needs >= 8 points");
    double span = *std::max_element(sweep.angles.begin(), sweep.angles.end()) -
                  *std::min_element(sweep.angles.begin(), sweep.angles.end());
    double len = double(sweep.angles.size());
    if (span * len / (len - 1.0) < 2 * M_PI / sweep.n_qubits - 1e-9)
        throw std::invalid_argument("ghz_fidelity: sweep must cover one period 2pi/N");
    auto fit = fit_fixed_period_cosine(sweep.angles, sweep.values, double(sweep.n_qubits));
    FidelityReport rep;
    rep.population_term = q_population;
    rep.parity_amplitude = fit.amplitude;
    rep.parity_phase = fit.phase;
    rep.coherence_term = fit.max_value;
    rep.fit_warning = fit.rms_residual > 0.05;
    rep.fidelity = detail::clip01(q_population - 0.5 + 0.5 * fit.max_value, &rep.clipped);
    return rep;
}

// Dual-species lower bound: substitute the best parity amplitude of any
// later step. `reports` is indexed by time step; entries without a parity
// fit (amplitude 0 and no sweep) are allowed at t0 itself.
inline FidelityReport ghz_dual_species_bound(const std::vector<FidelityReport>& reports,
                                             std::size_t t0, double q_population_t0) {
    if (t0 + 1 >= reports.size())
        throw std::invalid_argument("ghz_dual_species_bound: no later parity data");
    double best = 0;
    for (std::size_t t = t0 + 1; t < reports.size(); ++t)
        best = std::max(best, reports[t].parity_amplitude);
    FidelityReport rep;
    rep.population_term = q_population_t0;
    rep.coherence_term = best;
    rep.lower_bound = true;
    rep.fidelity = detail::clip01(q_population_t0 - 0.5 + 0.5 * best, &rep.clipped);
    return rep;
}

// ---------------------------------------------------------------------------
// Bell

// F_C = (1 - P)/4 + max_theta W(theta) from the fitted r(theta).
inline FidelityReport bell_fidelity(double p_zz, const ParitySweep& r_sweep) {
    if (r_sweep.angles.size() < 12)
        throw std::invalid_argument("bell_fidelity: r sweep needs >= 12 angles");
    double span = *std::max_element(r_sweep.angles.begin(), r_sweep.angles.end()) -
                  *std::min_element(r_sweep.angles.begin(), r_sweep.angles.end());
    if (span < 2 * M_PI * (1.0 - 1.0 / double(r_sweep.angles.size())) - 1e-9)
        throw std::invalid_argument("bell_fidelity: r sweep must span [0, 2pi)");
    auto fit = fit_bell_r(r_sweep.angles, r_sweep.values);
    FidelityReport rep;
    rep.population_term = p_zz;
    rep.bell_a = fit.a;
    rep.bell_b = fit.b;
    rep.bell_theta_star = fit.theta_star;
    rep.coherence_term = bell_fit_max_w(fit);
    rep.fit_warning = fit.rms_residual > 0.05;
    rep.fidelity = detail::clip01((1.0 - p_zz) / 4.0 + rep.coherence_term, &rep.clipped);
    return rep;
}

// Exact r(theta) = <(R(theta)+Z) (x) (R(theta)+Z)>/2 on a data pair.
inline double bell_r_exact(const QuantumState& s, int site_a, int site_b, double theta) {
    double acc = 0;
    const int n = s.n_sites();
    for (int ka = 0; ka < 2; ++ka)
        for (int kb = 0; kb < 2; ++kb) {
            PauliString p = PauliString::identity(n);
            if (ka == 0)
                p.set(site_a, PauliOp::R, theta);
            else
                p.set(site_a, PauliOp::Z);
            if (kb == 0)
                p.set(site_b, PauliOp::R, theta);
            else
                p.set(site_b, PauliOp::Z);
            acc += expect(s, p);
        }
    return acc / 2.0;
}

// ---------------------------------------------------------------------------
// flagging

struct FlaggedEnsemble {
    ShotEnsemble shots;
    double kept_fraction = 1.0;
};

// Postselect on the auxiliary species reading all-'0' (the flagging
// technique); discarded shots are counted, not reweighted.
inline FlaggedEnsemble postselect_on_aux(const ShotEnsemble& in, const ChainSpec& chain,
                                         Species aux) {
    FlaggedEnsemble out;
    out.shots.meta = in.meta;
    out.shots.meta.flags = "postselected";
    auto aux_sites = chain.sites_of(aux);
    for (const auto& b : in.bitstrings) {
        bool ok = true;
        for (int j : aux_sites) ok &= b[std::size_t(j)] == '0';
        if (ok) out.shots.bitstrings.push_back(b);
    }
    out.kept_fraction =
        in.bitstrings.empty() ? 1.0 : double(out.shots.n_shots()) / double(in.n_shots());
    return out;
}

// ---------------------------------------------------------------------------
// rotated-readout ensembles (cluster stabilizers and graph operators)

// Shots taken after the basis pulse: a pi/2 rotation with axis phase
// alpha - pi/2 applied to every data site of one parity class, which maps a
// Z measurement on those sites onto R(alpha).
struct RotatedEnsembles {
    int rotated_parity = 0;          // 0 = even data indices rotated, 1 = odd
    std::vector<double> alphas;      // readout angles
    std::vector<ShotEnsemble> shots; // one ensemble per angle
};

namespace detail {
inline double shot_parity(const std::string& bits, const std::vector<int>& sites) {
    double p = 1;
    for (int j : sites) p *= bits[std::size_t(j)] == '1' ? -1.0 : 1.0;
    return p;
}

inline double mean_parity(const ShotEnsemble& e, const std::vector<int>& sites) {
    if (e.bitstrings.empty()) throw std::invalid_argument("mean_parity: empty ensemble");
    double acc = 0;
    for (const auto& b : e.bitstrings) acc += shot_parity(b, sites);
    return acc / double(e.n_shots());
}
} // namespace detail

struct StabilizerEstimate {
    int index = 0;       // stabilizer site (data indexing)
    double amplitude = 0; // fitted peak amplitude, >= 0
    double phase = 0;     // alpha at the cosine maximum
    double offset = 0;
    std::vector<double> curve; // measured parity at each alpha
};

// Per-site cluster stabilizer values from even/odd rotated readout.
// data_sites maps data index -> chain position. Stabilizer i needs the
// ensembles where i's parity class was rotated; a mismatch throws.
inline std::vector<StabilizerEstimate> stabilizer_scan(const RotatedEnsembles& even,
                                                       const RotatedEnsembles& odd,
                                                       const std::vector<int>& data_sites) {
    if (even.rotated_parity != 0 || odd.rotated_parity != 1)
        throw std::invalid_argument("stabilizer_scan: ensemble parity class mismatch");
    if (even.alphas.size() < 8 || odd.alphas.size() < 8)
        throw std::invalid_argument("stabilizer_scan: alpha grid needs >= 8 points");
    const int n = static_cast<int>(data_sites.size());
    if (n < 2) throw std::invalid_argument("stabilizer_scan: need >= 2 data sites");
    std::vector<StabilizerEstimate> out;
    for (int i = 0; i < n; ++i) {
        const RotatedEnsembles& src = (i % 2 == 0) ? even : odd;
        std::vector<int> sites;
        if (i > 0) sites.push_back(data_sites[std::size_t(i - 1)]);
        sites.push_back(data_sites[std::size_t(i)]);
        if (i + 1 < n) sites.push_back(data_sites[std::size_t(i + 1)]);
        StabilizerEstimate est;
        est.index = i;
        std::vector<double> ys;
        for (std::size_t k = 0; k < src.alphas.size(); ++k)
            ys.push_back(detail::mean_parity(src.shots[k], sites));
        auto fit = fit_shifted_basis(src.alphas, ys, [](double x) { return std::cos(x); });
        est.amplitude = std::abs(fit.amplitude);
        est.phase = fit.amplitude >= 0 ? fit.shift : std::fmod(fit.shift + M_PI, 2 * M_PI);
        est.offset = fit.offset;
        est.curve = std::move(ys);
        out.push_back(std::move(est));
    }
    return out;
}

// Exact counterpart used by tests: <Z R(alpha) Z> profile of stabilizer i.
inline double stabilizer_expectation_exact(const QuantumState& s,
                                           const std::vector<int>& data_sites, int i,
                                           double alpha) {
    const int n = static_cast<int>(data_sites.size());
    PauliString p = PauliString::identity(s.n_sites());
    if (i > 0) p.set(data_sites[std::size_t(i - 1)], PauliOp::Z);
    p.set(data_sites[std::size_t(i)], PauliOp::R, alpha);
    if (i + 1 < n) p.set(data_sites[std::size_t(i + 1)], PauliOp::Z);
    return expect(s, p);
}

// ---------------------------------------------------------------------------
// Graph-State operator table

enum class GraphFitForm { kNA, kCos, kCos2, kCos3, kCos2Sin };

struct GraphOperatorSpec {
    std::string label;     // letters I/Z/R over the data sites
    GraphFitForm form = GraphFitForm::kNA;
    double ideal_max = 0;
};

// Operators with non-zero ideal expectation for the 5-site Graph-State
// automaton, per time step, with their fit forms and ideal maxima.
inline std::vector<GraphOperatorSpec> graph_qca_expected_operators(int t) {
    const double c23 = 2.0 / (3.0 * std::sqrt(3.0));
    const double c43 = 4.0 / (3.0 * std::sqrt(3.0));
    using F = GraphFitForm;
    std::vector<GraphOperatorSpec> out;
    auto add = [&](std::initializer_list<const char*> labels, F f, double m) {
        for (const char* l : labels) out.push_back({l, f, m});
    };
    switch (t) {
        case 0:
            add({"IIIIZ", "IIIZI", "IIZII", "IZIII", "ZIIII", "IIZIZ", "IZIZI", "ZIIIZ",
                 "ZIZII", "ZIZIZ"},
                F::kNA, 1);
            break;
        case 1:
            add({"IIIZR", "RZIII", "IIZRZ", "IZRZI", "ZRZII"}, F::kCos, 1);
            add({"RZIZR"}, F::kCos2, 1);
            add({"IZRIR", "RIRZI"}, F::kCos2, 0.5);
            add({"RIRIR"}, F::kCos2Sin, c23);
            break;
        case 2:
            add({"IIZRI", "IRZII"}, F::kCos, 1);
            add({"IRIRI", "RIIIR", "IZRZR", "RZRZI"}, F::kCos2, 1);
            add({"RZRZR"}, F::kCos3, 1);
            break;
        case 3:
            add({"IZIZI", "ZIIIZ"}, F::kNA, 1);
            add({"IIRZI", "IZRII"}, F::kCos, 1);
            add({"RIIZR", "RZIIR", "IRZRZ", "ZRZRI"}, F::kCos2, 1);
            add({"RIRIR", "RZRZR"}, F::kCos2Sin, c43);
            break;
        case 4:
            add({"IIIRZ", "ZRIII"}, F::kCos, 1);
            add({"ZRIRZ", "RZIZR"}, F::kCos2, 1);
            add({"IIRZR", "RZRII"}, F::kCos2, 0.5);
            add({"RZRZR"}, F::kCos2Sin, c23);
            break;
        case 5:
            add({"IIIIR", "IIIRI", "IIRII", "IRIII", "RIIII"}, F::kCos, 1);
            add({"IIRIR", "IRIRI", "RIIIR", "RIRII"}, F::kCos2, 1);
            add({"RIRIR"}, F::kCos3, 1);
            break;
        default:
            throw std::invalid_argument("graph_qca_expected_operators: t must be 0..5");
    }
    return out;
}

struct GraphOperatorResult {
    std::string label;
    GraphFitForm form = GraphFitForm::kNA;
    double reported = 0;   // |A| + |C|, or |mean| for alpha-independent ops
    double amplitude = 0;  // |A|
    double offset = 0;     // C
    double shift = 0;      // phi_0
};

namespace detail {
// Which parity class must be rotated to measure this operator: R sites are
// read through the rotation, Z sites through the bare Z basis, so all R
// sites must share a parity and all Z sites must sit on the other one.
inline int graph_ensemble_parity(const std::string& label) {
    int r_parity = -1, z_parity = -1;
    for (std::size_t j = 0; j < label.size(); ++j) {
        int p = int(j % 2);
        if (label[j] == 'R') {
            if (r_parity == -1) r_parity = p;
            else if (r_parity != p)
                throw std::invalid_argument("graph operator mixes R parities: " + label);
        } else if (label[j] == 'Z') {
            if (z_parity == -1) z_parity = p;
            else if (z_parity != p)
                z_parity = 2; // both parities carry Z
        } else if (label[j] != 'I') {
            throw std::invalid_argument("unknown graph operator label: " + label);
        }
    }
    if (r_parity != -1) {
        if (z_parity != -1 && z_parity != 2 && z_parity == r_parity)
            throw std::invalid_argument("graph operator has Z on rotated sites: " + label);
        if (z_parity == 2)
            throw std::invalid_argument("graph operator has Z on rotated sites: " + label);
        return r_parity;
    }
    if (z_parity == -1 || z_parity == 2) {
        if (z_parity == 2)
            throw std::invalid_argument(
                "graph operator needs an unrotated basis on both parities: " + label);
        return 0; // identity: any ensemble
    }
    return 1 - z_parity; // rotate the other class, leave the Z sites alone
}

inline std::function<double(double)> graph_fit_basis(GraphFitForm f) {
    switch (f) {
        case GraphFitForm::kCos: return [](double x) { return std::cos(x); };
        case GraphFitForm::kCos2: return [](double x) { return std::cos(2 * x); };
        case GraphFitForm::kCos3: {
            return [](double x) { double c = std::cos(x); return c * c * c; };
        }
        case GraphFitForm::kCos2Sin: {
            return [](double x) {
                double c = std::cos(x);
                return (3.0 * std::sqrt(3.0) / 2.0) * c * c * std::sin(x);
            };
        }
        default: return [](double) { return 0.0; };
    }
}
} // namespace detail

// Fit the alpha sweep of each requested operator. Operators read their data
// from the rotated ensemble matching the parity of their R sites; pure-Z
// operators use the even ensembles (any basis works for them).
inline std::vector<GraphOperatorResult> graph_operator_scan(
    const RotatedEnsembles& even, const RotatedEnsembles& odd,
    const std::vector<int>& data_sites, const std::vector<GraphOperatorSpec>& ops) {
    if (even.rotated_parity != 0 || odd.rotated_parity != 1)
        throw std::invalid_argument("graph_operator_scan: ensemble parity class mismatch");
    if (even.alphas.size() < 8 || odd.alphas.size() < 8)
        throw std::invalid_argument("graph_operator_scan: alpha grid needs >= 8 points");
    std::vector<GraphOperatorResult> out;
    for (const auto& op : ops) {
        if (op.label.size() != data_sites.size())
            throw std::invalid_argument("graph_operator_scan: label length mismatch");
        int parity = detail::graph_ensemble_parity(op.label);
        const RotatedEnsembles& src = (parity == 1) ? odd : even;
        std::vector<int> sites;
        for (std::size_t j = 0; j < op.label.size(); ++j)
            if (op.label[j] != 'I') sites.push_back(data_sites[j]);
        GraphOperatorResult res;
        res.label = op.label;
        res.form = op.form;
        std::vector<double> ys;
        for (std::size_t k = 0; k < src.alphas.size(); ++k)
            ys.push_back(detail::mean_parity(src.shots[k], sites));
        if (op.form == GraphFitForm::kNA) {
            double mean = 0;
            for (double v : ys) mean += v;
            mean /= double(ys.size());
            res.offset = mean;
            res.reported = std::abs(mean);
        } else {
            auto fit = fit_shifted_basis(src.alphas, ys, detail::graph_fit_basis(op.form));
            res.amplitude = std::abs(fit.amplitude);
            res.offset = fit.offset;
            res.shift = fit.shift;
            res.reported = std::abs(fit.amplitude) + std::abs(fit.offset);
        }
        out.push_back(std::move(res));
    }
    return out;
}

// Exact operator profile for tests: <label(alpha)> with R(alpha) on R sites.
inline double graph_operator_exact(const QuantumState& s, const std::vector<int>& data_sites,
                                   const std::string& label, double alpha) {
    PauliString p = PauliString::identity(s.n_sites());
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] == 'Z') p.set(data_sites[j], PauliOp::Z);
        if (label[j] == 'R') p.set(data_sites[j], PauliOp::R, alpha);
    }
    return expect(s, p);
}

} // namespace qca
