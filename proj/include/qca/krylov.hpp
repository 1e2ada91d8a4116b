#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qca {

// Arnoldi exp(-i t G) v for a matrix-free generator G (generally
// non-Hermitian: G = 2pi H - i/2 sum L^dag L). Piecewise-constant segments
// only, adaptive substepping on the standard Hessenberg error estimate.

struct KrylovOptions {
    int m_max = 30;
    double tol = 1e-9; // local error per substep, relative to |v|
    int max_substeps = 200000;
};

template <class Gen>
void expv_inplace(const Gen& gen, std::vector<std::complex<double>>& v, double t,
                  const KrylovOptions& opt = {}) {
    using cd = std::complex<double>;
    const std::size_t n = v.size();
    if (t == 0.0) return;
    const int m_cap = static_cast<int>(std::min<std::size_t>(std::size_t(opt.m_max), n));

    std::vector<std::vector<cd>> basis;
    std::vector<cd> w(n);
    double remaining = t;
    double tau = t;
    int steps = 0;

    while (remaining > 1e-15 * std::abs(t)) {
        if (++steps > opt.max_substeps)
            throw std::runtime_error("krylov: substep limit exceeded");
        tau = std::min(tau, remaining);

        double beta = 0;
        for (const auto& a : v) beta += std::norm(a);
        beta = std::sqrt(beta);
        if (beta == 0) return; // nothing to evolve

        // Arnoldi factorization
        basis.assign(1, v);
        for (auto& a : basis[0]) a /= beta;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m_cap + 1, m_cap);
        int m = m_cap;
        for (int j = 0; j < m_cap; ++j) {
            gen.apply(basis[std::size_t(j)], w);
            for (int i = 0; i <= j; ++i) {
                cd dot = 0;
                const auto& bi = basis[std::size_t(i)];
                for (std::size_t k = 0; k < n; ++k) dot += std::conj(bi[k]) * w[k];
                h(i, j) = dot;
                for (std::size_t k = 0; k < n; ++k) w[k] -= dot * bi[k];
            }
            // one re-orthogonalization pass for stability
            for (int i = 0; i <= j; ++i) {
                cd dot = 0;
                const auto& bi = basis[std::size_t(i)];
                for (std::size_t k = 0; k < n; ++k) dot += std::conj(bi[k]) * w[k];
                h(i, j) += dot;
                for (std::size_t k = 0; k < n; ++k) w[k] -= dot * bi[k];
            }
            double hn = 0;
            for (const auto& a : w) hn += std::norm(a);
            hn = std::sqrt(hn);
            h(j + 1, j) = hn;
            if (hn < 1e-12) {
                m = j + 1; // invariant subspace: exact result
                break;
            }
            if (j + 1 < m_cap) {
                basis.push_back(w);
                for (auto& a : basis.back()) a /= hn;
            }
        }

        while (true) {
            Eigen::MatrixXcd hm = h.topLeftCorner(m, m);
            Eigen::MatrixXcd em = (cd(0, -tau) * hm).exp();
            double err = (m == m_cap)
                             ? std::abs(h(m, m - 1)) * std::abs(em(m - 1, 0)) * tau * beta
                             : 0.0;
            if (err <= opt.tol * beta || tau <= 1e-14 * std::abs(t)) {
                for (std::size_t k = 0; k < n; ++k) {
                    cd acc = 0;
                    for (int i = 0; i < m; ++i) acc += basis[std::size_t(i)][k] * em(i, 0);
                    v[k] = beta * acc;
                }
                remaining -= tau;
                // gentle growth when the step was comfortably accurate
                if (err < 0.1 * opt.tol * beta) tau *= 1.8;
                break;
            }
            tau *= 0.5;
        }
    }
}

} // namespace qca
