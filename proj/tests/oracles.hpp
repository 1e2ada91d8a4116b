#pragma once

// Test-only oracles. Everything here is computed by an independent route
// (dense matrix algebra, brute-force scans) and must not call into the
// implementation paths it checks.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qca/pauli.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat pauli_i() { return Mat::Identity(2, 2); }
inline Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Mat pauli_y() {
    Mat m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}
inline Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
inline Mat pauli_r(double alpha) { return std::cos(alpha) * pauli_x() + std::sin(alpha) * pauli_y(); }

inline Mat pauli_matrix(const qca::PauliString& p, int n) {
    Mat out = Mat::Identity(1, 1);
    for (int j = 0; j < n; ++j) {
        Mat f;
        switch (p.at(j).op) {
            case qca::PauliOp::I: f = pauli_i(); break;
            case qca::PauliOp::X: f = pauli_x(); break;
            case qca::PauliOp::Y: f = pauli_y(); break;
            case qca::PauliOp::Z: f = pauli_z(); break;
            case qca::PauliOp::R: f = pauli_r(p.at(j).alpha); break;
        }
        out = kron(out, f);
    }
    return p.sign * out;
}

// exp(-i theta/2 (cos(phase) X + sin(phase) Y)) via dense matrix exponential
inline Mat rotation_matrix(double theta, double phase) {
    Mat g = std::cos(phase) * pauli_x() + std::sin(phase) * pauli_y();
    Mat a = cd(0, -theta / 2) * g;
    return a.exp();
}

// Eq. S6 mediated diagonal gate on a data pair, by direct substitution.
inline Mat mediated_u_matrix(double phi, double Phi) {
    Mat zq = cd(0, (phi - Phi) / 4.0) * pauli_z();
    Mat single = zq.exp();
    Mat zz = kron(pauli_z(), pauli_z());
    Mat pair = (cd(0, (phi + Phi) / 4.0) * zz).exp();
    return kron(single, single) * pair;
}

// Eq. S8 composite V = U (X x X) U.
inline Mat mediated_v_matrix(double phi, double Phi) {
    Mat u = mediated_u_matrix(phi, Phi);
    return u * kron(pauli_x(), pauli_x()) * u;
}

// Frobenius distance up to global phase.
inline double distance_up_to_phase(const Mat& a, const Mat& b) {
    cd tr = (a.adjoint() * b).trace();
    cd phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : cd(1, 0);
    return (a * phase - b).norm();
}

// Dense column-major state vector ops for small n (site 0 = MSB).
inline Vec state_to_vec(const std::vector<cd>& amps) {
    Vec v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
    return v;
}

// Reduced density matrix on `sites` (ascending), tracing out the rest.
inline Mat reduced_density(const Vec& psi, int n, const std::vector<int>& sites) {
    int k = static_cast<int>(sites.size());
    std::size_t dk = std::size_t(1) << k;
    Mat rho = Mat::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    std::size_t dim = std::size_t(1) << n;
    auto sub_index = [&](std::size_t full) {
        std::size_t s = 0;
        for (int b = 0; b < k; ++b) {
            int site = sites[static_cast<std::size_t>(b)];
            std::size_t bit = (full >> (n - 1 - site)) & 1u;
            s = (s << 1) | bit;
        }
        return s;
    };
    auto rest_index = [&](std::size_t full) {
        std::size_t s = 0;
        for (int site = 0; site < n; ++site) {
            bool traced = true;
            for (int q : sites)
                if (q == site) traced = false;
            if (!traced) continue;
            std::size_t bit = (full >> (n - 1 - site)) & 1u;
            s = (s << 1) | bit;
        }
        return s;
    };
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (rest_index(i) == rest_index(j))
                rho(static_cast<Eigen::Index>(sub_index(i)), static_cast<Eigen::Index>(sub_index(j))) +=
                    psi(static_cast<Eigen::Index>(i)) * std::conj(psi(static_cast<Eigen::Index>(j)));
    return rho;
}

// max_phi <GHZ(phi)| rho |GHZ(phi)> with GHZ between two basis patterns,
// via dense scan over phi.
inline double ghz_overlap_scan(const Mat& rho, std::size_t b1, std::size_t b2, int n_phi = 4096) {
    double best = 0;
    for (int k = 0; k < n_phi; ++k) {
        double phi = 2 * M_PI * k / n_phi;
        Vec g = Vec::Zero(rho.rows());
        g(static_cast<Eigen::Index>(b1)) = 1.0 / std::sqrt(2.0);
        g(static_cast<Eigen::Index>(b2)) = std::exp(cd(0, phi)) / std::sqrt(2.0);
        double v = std::real((g.adjoint() * rho * g)(0, 0));
        best = std::max(best, v);
    }
    return best;
}

// Brute-force quasiparticle scan: the three 4-site patterns plus edge
// patterns, by direct substring matching.
inline std::vector<int> qp_pattern_scan(const std::string& b) {
    std::vector<int> fired;
    int L = static_cast<int>(b.size());
    if (b.substr(0, 3) == "001") fired.push_back(1);
    for (int j = 2; j <= L - 2; ++j) {
        std::string w = b.substr(static_cast<std::size_t>(j - 2), 4);
        if (w == "0001" || w == "1000" || w == "1001") fired.push_back(j);
    }
    if (b.substr(static_cast<std::size_t>(L - 3), 3) == "100") fired.push_back(L - 1);
    return fired;
}

// Dense Lindblad RK4 integrator, angular frequencies already applied.
// d rho/dt = -i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho})
inline Mat lindblad_rk4(const Mat& h_angular, const std::vector<Mat>& ls, Mat rho, double t,
                        int steps) {
    auto rhs = [&](const Mat& r) {
        Mat out = cd(0, -1) * (h_angular * r - r * h_angular);
        for (const auto& l : ls) {
            Mat ldl = l.adjoint() * l;
            out += l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl);
        }
        return out;
    };
    double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
        Mat k1 = rhs(rho);
        Mat k2 = rhs(rho + 0.5 * dt * k1);
        Mat k3 = rhs(rho + 0.5 * dt * k2);
        Mat k4 = rhs(rho + dt * k3);
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return rho;
}

// chi^2 critical value for p = 0.001, dof = 31 (5-site sampling test)
inline constexpr double kChi2Crit31_999 = 61.098;

} // namespace oracle
