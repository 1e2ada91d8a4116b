#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qca {

// Deterministic least-squares fits used by the analysis pipelines. All fits
// are linear solves plus (where a phase is free) a coarse grid with a
// golden-section polish, so results are reproducible bit-for-bit.

struct CosineFit {
    double amplitude = 0; // >= 0
    double phase = 0;     // model: amplitude * cos(k(x - phase)) + offset
    double offset = 0;
    double rms_residual = 0;
    double max_value = 0; // max of the fitted curve = amplitude + offset
};

// Fit a*cos(k x) + b*sin(k x) + c with fixed integer-like frequency k.
inline CosineFit fit_fixed_period_cosine(const std::vector<double>& x,
                                         const std::vector<double>& y, double k) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_fixed_period_cosine: need >= 3 samples");
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd m(n, 3);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        m(i, 0) = std::cos(k * x[std::size_t(i)]);
        m(i, 1) = std::sin(k * x[std::size_t(i)]);
        m(i, 2) = 1.0;
        v(i) = y[std::size_t(i)];
    }
    Eigen::Vector3d sol = (m.transpose() * m).ldlt().solve(m.transpose() * v);
    CosineFit f;
    f.amplitude = std::hypot(sol(0), sol(1));
    f.phase = std::atan2(sol(1), sol(0)) / k;
    f.offset = sol(2);
    Eigen::VectorXd r = m * sol - v;
    f.rms_residual = std::sqrt(r.squaredNorm() / n);
    f.max_value = f.amplitude + f.offset;
    return f;
}

// Generic shifted-basis fit: y ~ A * f(x - x0) + C with free (A, C, x0).
// Deterministic: x0 grid scan with nested linear solve, then golden-section.
struct ShiftedBasisFit {
    double amplitude = 0;
    double shift = 0;
    double offset = 0;
    double rms_residual = 0;
};

namespace detail {
inline double shifted_fit_residual(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::function<double(double)>& f, double x0, double* a,
                                   double* c) {
    const int n = static_cast<int>(x.size());
    double sff = 0, sf = 0, sfy = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        double fi = f(x[std::size_t(i)] - x0);
        sff += fi * fi;
        sf += fi;
        sfy += fi * y[std::size_t(i)];
        sy += y[std::size_t(i)];
    }
    double det = sff * n - sf * sf;
    double A, C;
    if (std::abs(det) < 1e-14) {
        A = 0;
        C = sy / n;
    } else {
        A = (sfy * n - sf * sy) / det;
        C = (sy * sff - sf * sfy) / det;
    }
    double res = 0;
    for (int i = 0; i < n; ++i) {
        double d = y[std::size_t(i)] - (A * f(x[std::size_t(i)] - x0) + C);
        res += d * d;
    }
    *a = A;
    *c = C;
    return res;
}
} // namespace detail

inline ShiftedBasisFit fit_shifted_basis(const std::vector<double>& x,
                                         const std::vector<double>& y,
                                         const std::function<double(double)>& f,
                                         int grid = 256) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("fit_shifted_basis: need >= 4 samples");
    double best_x0 = 0, best_res = 1e300;
    for (int g = 0; g < grid; ++g) {
        double x0 = 2 * M_PI * g / grid;
        double a, c;
        double res = detail::shifted_fit_residual(x, y, f, x0, &a, &c);
        if (res < best_res) {
            best_res = res;
            best_x0 = x0;
        }
    }
    // golden-section polish around the best grid point
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double lo = best_x0 - 2 * M_PI / grid, hi = best_x0 + 2 * M_PI / grid;
    double a1 = hi - gr * (hi - lo), b1 = lo + gr * (hi - lo);
    double aa, cc;
    double fa = detail::shifted_fit_residual(x, y, f, a1, &aa, &cc);
    double fb = detail::shifted_fit_residual(x, y, f, b1, &aa, &cc);
    for (int it = 0; it < 90; ++it) {
        if (fa < fb) {
            hi = b1;
            b1 = a1;
            fb = fa;
            a1 = hi - gr * (hi - lo);
            fa = detail::shifted_fit_residual(x, y, f, a1, &aa, &cc);
        } else {
            lo = a1;
            a1 = b1;
            fa = fb;
            b1 = lo + gr * (hi - lo);
            fb = detail::shifted_fit_residual(x, y, f, b1, &aa, &cc);
        }
    }
    double x0 = (lo + hi) / 2;
    ShiftedBasisFit out;
    double res = detail::shifted_fit_residual(x, y, f, x0, &out.amplitude, &out.offset);
    out.shift = std::fmod(x0 + 4 * M_PI, 2 * M_PI);
    out.rms_residual = std::sqrt(res / double(x.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Bell coherence fit: r(theta) ~ 2AB (B sin^2(t - t*) + 2 cos(t - t*)).
// Linear in (u, v) = (2AB^2, 4AB) at fixed t*, so scan t* on a 256-point
// grid with nested linear solves, then golden-section polish.

struct BellRFit {
    double a = 0;
    double b = 0;
    double theta_star = 0;
    double rms_residual = 0;
};

namespace detail {
inline double bell_fit_residual(const std::vector<double>& th, const std::vector<double>& r,
                                double ts, double* u_out, double* v_out) {
    const int n = static_cast<int>(th.size());
    double suu = 0, svv = 0, suv = 0, sur = 0, svr = 0;
    for (int i = 0; i < n; ++i) {
        double s2 = std::sin(th[std::size_t(i)] - ts);
        s2 *= s2;
        double co = std::cos(th[std::size_t(i)] - ts);
        suu += s2 * s2;
        svv += co * co;
        suv += s2 * co;
        sur += s2 * r[std::size_t(i)];
        svr += co * r[std::size_t(i)];
    }
    double det = suu * svv - suv * suv;
    double u, v;
    if (std::abs(det) < 1e-14) {
        u = 0;
        v = std::abs(svv) > 1e-14 ? svr / svv : 0;
    } else {
        u = (sur * svv - suv * svr) / det;
        v = (suu * svr - suv * sur) / det;
    }
    double res = 0;
    for (int i = 0; i < n; ++i) {
        double s2 = std::sin(th[std::size_t(i)] - ts);
        s2 *= s2;
        double co = std::cos(th[std::size_t(i)] - ts);
        double d = r[std::size_t(i)] - (u * s2 + v * co);
        res += d * d;
    }
    *u_out = u;
    *v_out = v;
    return res;
}
} // namespace detail

inline BellRFit fit_bell_r(const std::vector<double>& theta, const std::vector<double>& r) {
    if (theta.size() != r.size() || theta.size() < 12)
        throw std::invalid_argument("fit_bell_r: need >= 12 samples over [0, 2pi)");
    double best_ts = 0, best_res = 1e300;
    for (int g = 0; g < 256; ++g) {
        double ts = 2 * M_PI * g / 256;
        double u, v;
        double res = detail::bell_fit_residual(theta, r, ts, &u, &v);
        if (res < best_res) {
            best_res = res;
            best_ts = ts;
        }
    }
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double lo = best_ts - 2 * M_PI / 256, hi = best_ts + 2 * M_PI / 256;
    double u, v;
    double a1 = hi - gr * (hi - lo), b1 = lo + gr * (hi - lo);
    double fa = detail::bell_fit_residual(theta, r, a1, &u, &v);
    double fb = detail::bell_fit_residual(theta, r, b1, &u, &v);
    for (int it = 0; it < 90; ++it) {
        if (fa < fb) {
            hi = b1;
            b1 = a1;
            fb = fa;
            a1 = hi - gr * (hi - lo);
            fa = detail::bell_fit_residual(theta, r, a1, &u, &v);
        } else {
            lo = a1;
            a1 = b1;
            fa = fb;
            b1 = lo + gr * (hi - lo);
            fb = detail::bell_fit_residual(theta, r, b1, &u, &v);
        }
    }
    double ts = (lo + hi) / 2;
    double res = detail::bell_fit_residual(theta, r, ts, &u, &v);
    BellRFit out;
    // u = 2AB^2, v = 4AB -> B = 2u/v, A = v^2/(8u); canonicalize to B >= 0
    // via (A, B, ts) ~ (A, -B, ts + pi).
    if (std::abs(u) < 1e-12) {
        out.b = 0;
        out.a = v / 4.0; // interpret as the B->0 limit of 4AB cos
    } else {
        out.b = 2 * u / v;
        out.a = v * v / (8 * u);
        if (out.b < 0) {
            out.b = -out.b;
            ts += M_PI;
        }
    }
    out.theta_star = std::fmod(ts + 4 * M_PI, 2 * M_PI);
    out.rms_residual = std::sqrt(res / double(theta.size()));
    return out;
}

// max over theta of W(theta) = AB (B cos^2(x) + 2 cos(x)) for the fitted
// parameters; the maximizing x = theta - theta_star solves a quadratic in
// cos(x) restricted to [-1, 1].
inline double bell_fit_max_w(const BellRFit& f) {
    double ab = f.a * f.b;
    auto w = [&](double c) { return ab * (f.b * c * c + 2 * c); };
    double best = std::max(w(1.0), w(-1.0));
    if (std::abs(f.b) > 1e-12) {
        double c = -1.0 / f.b;
        if (c >= -1 && c <= 1) best = std::max(best, w(c));
    }
    return best;
}

// Damped classical orbit for the staggered magnetization:
//   M(t) ~ A e^{-t/tau} (2/sqrt3) cos(pi (t - 1.5)/3)
// Deterministic tau scan (log-spaced) with golden polish; A is linear.
struct DampedOrbitFit {
    double amplitude = 1;
    double tau = 0; // in pi-pulses
    double rms_residual = 0;
};

inline double classical_staggered_orbit(double t) {
    return (2.0 / std::sqrt(3.0)) * std::cos(M_PI * (t - 1.5) / 3.0);
}

inline DampedOrbitFit fit_damped_orbit(const std::vector<double>& t,
                                       const std::vector<double>& m) {
    if (t.size() != m.size() || t.size() < 6)
        throw std::invalid_argument("fit_damped_orbit: need >= 6 samples");
    auto residual = [&](double tau, double* a_out) {
        double sff = 0, sfy = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double fi = std::exp(-t[i] / tau) * classical_staggered_orbit(t[i]);
            sff += fi * fi;
            sfy += fi * m[i];
        }
        double a = sff > 1e-300 ? sfy / sff : 0;
        double res = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double d = m[i] - a * std::exp(-t[i] / tau) * classical_staggered_orbit(t[i]);
            res += d * d;
        }
        *a_out = a;
        return res;
    };
    double best_tau = 10, best_res = 1e300;
    for (int g = 0; g <= 400; ++g) {
        double tau = std::exp(std::log(2.0) + (std::log(3000.0) - std::log(2.0)) * g / 400.0);
        double a;
        double res = residual(tau, &a);
        if (res < best_res) {
            best_res = res;
            best_tau = tau;
        }
    }
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double lo = best_tau * 0.97, hi = best_tau * 1.03;
    double a;
    double a1 = hi - gr * (hi - lo), b1 = lo + gr * (hi - lo);
    double fa = residual(a1, &a), fb = residual(b1, &a);
    for (int it = 0; it < 70; ++it) {
        if (fa < fb) {
            hi = b1;
            b1 = a1;
            fb = fa;
            a1 = hi - gr * (hi - lo);
            fa = residual(a1, &a);
        } else {
            lo = a1;
            a1 = b1;
            fa = fb;
            b1 = lo + gr * (hi - lo);
            fb = residual(b1, &a);
        }
    }
    DampedOrbitFit out;
    out.tau = (lo + hi) / 2;
    double res = residual(out.tau, &out.amplitude);
    out.rms_residual = std::sqrt(res / double(t.size()));
    return out;
}

} // namespace qca
