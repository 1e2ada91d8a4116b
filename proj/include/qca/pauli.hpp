#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qca {

using cd = std::complex<double>;

// Single-site operator letter. R(alpha) = cos(alpha) X + sin(alpha) Y is the
// equatorial readout operator; it appears in sweep analysis but is rejected
// by the Clifford machinery.
enum class PauliOp : int { I = 0, X = 1, Y = 2, Z = 3, R = 4 };

struct PauliFactor {
    PauliOp op = PauliOp::I;
    double alpha = 0.0; // used only when op == R

    bool operator==(const PauliFactor& o) const {
        return op == o.op && (op != PauliOp::R || alpha == o.alpha);
    }
};

// Signed tensor product of single-site letters. Identity padding is implied
// for sites beyond factors.size(). The sign stays in {+1,-1,+i,-i} under all
// Clifford operations (values are exact in floating point).
struct PauliString {
    cd sign = cd(1.0, 0.0);
    std::vector<PauliFactor> factors;

    static PauliString identity(int n) {
        PauliString p;
        p.factors.assign(static_cast<std::size_t>(n), PauliFactor{});
        return p;
    }

    // e.g. single_site(5, 0, PauliOp::Z) is Z_0 on 5 sites
    static PauliString single_site(int n, int site, PauliOp op, double alpha = 0.0) {
        PauliString p = identity(n);
        p.factors.at(static_cast<std::size_t>(site)) = PauliFactor{op, alpha};
        return p;
    }

    int n_sites() const { return static_cast<int>(factors.size()); }

    PauliFactor at(int j) const {
        return j < n_sites() ? factors[static_cast<std::size_t>(j)] : PauliFactor{};
    }

    void set(int j, PauliOp op, double alpha = 0.0) {
        factors.at(static_cast<std::size_t>(j)) = PauliFactor{op, alpha};
    }

    bool has_r() const {
        for (const auto& f : factors)
            if (f.op == PauliOp::R) return true;
        return false;
    }

    int weight() const {
        int w = 0;
        for (const auto& f : factors)
            if (f.op != PauliOp::I) ++w;
        return w;
    }

    bool same_letters(const PauliString& o) const {
        if (n_sites() != o.n_sites()) return false;
        for (int j = 0; j < n_sites(); ++j)
            if (!(at(j) == o.at(j))) return false;
        return true;
    }

    bool operator==(const PauliString& o) const {
        return same_letters(o) && std::abs(sign - o.sign) < 1e-12;
    }
};

namespace detail {
// product of two single-site letters: a*b = phase * letter
inline void pauli_letter_mul(PauliOp a, PauliOp b, PauliOp& out, cd& phase) {
    phase = cd(1, 0);
    if (a == PauliOp::I) { out = b; return; }
    if (b == PauliOp::I) { out = a; return; }
    if (a == b) { out = PauliOp::I; return; }
    // XY=iZ YZ=iX ZX=iY, anti-cyclic get -i
    auto idx = [](PauliOp p) { return static_cast<int>(p); }; // X=1 Y=2 Z=3
    int ia = idx(a), ib = idx(b);
    int ic = 6 - ia - ib; // the remaining letter
    bool cyclic = (ib - ia + 3) % 3 == 1; // X->Y->Z->X
    phase = cyclic ? cd(0, 1) : cd(0, -1);
    out = static_cast<PauliOp>(ic);
}
} // namespace detail

// Operator product a*b with exact sign tracking. R factors are not supported
// here (multiplication of R letters is not closed).
inline PauliString pauli_mul(const PauliString& a, const PauliString& b) {
    if (a.has_r() || b.has_r())
        throw std::invalid_argument("pauli_mul: R(alpha) factors unsupported");
    int n = std::max(a.n_sites(), b.n_sites());
    PauliString out = PauliString::identity(n);
    out.sign = a.sign * b.sign;
    for (int j = 0; j < n; ++j) {
        cd ph;
        PauliOp op;
        detail::pauli_letter_mul(a.at(j).op, b.at(j).op, op, ph);
        out.sign *= ph;
        out.factors[static_cast<std::size_t>(j)] = PauliFactor{op, 0.0};
    }
    return out;
}

// Text form: sign prefix then one letter per site, e.g. "+XZIII", "-iYZ".
// R factors print as R; parsing R uses alpha = 0 unless set later.
inline std::string to_string(const PauliString& p) {
    std::string s;
    cd g = p.sign;
    if (std::abs(g - cd(1, 0)) < 1e-9) s = "+";
    else if (std::abs(g - cd(-1, 0)) < 1e-9) s = "-";
    else if (std::abs(g - cd(0, 1)) < 1e-9) s = "+i";
    else if (std::abs(g - cd(0, -1)) < 1e-9) s = "-i";
    else s = "(" + std::to_string(g.real()) + "," + std::to_string(g.imag()) + ")";
    for (const auto& f : p.factors) {
        switch (f.op) {
            case PauliOp::I: s += 'I'; break;
            case PauliOp::X: s += 'X'; break;
            case PauliOp::Y: s += 'Y'; break;
            case PauliOp::Z: s += 'Z'; break;
            case PauliOp::R: s += 'R'; break;
        }
    }
    return s;
}

inline PauliString pauli_parse(const std::string& text) {
    PauliString p;
    std::size_t i = 0;
    p.sign = cd(1, 0);
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        bool neg = text[i] == '-';
        ++i;
        if (i < text.size() && text[i] == 'i') {
            p.sign = neg ? cd(0, -1) : cd(0, 1);
            ++i;
        } else {
            p.sign = neg ? cd(-1, 0) : cd(1, 0);
        }
    }
    for (; i < text.size(); ++i) {
        switch (text[i]) {
            case 'I': p.factors.push_back({PauliOp::I, 0.0}); break;
            case 'X': p.factors.push_back({PauliOp::X, 0.0}); break;
            case 'Y': p.factors.push_back({PauliOp::Y, 0.0}); break;
            case 'Z': p.factors.push_back({PauliOp::Z, 0.0}); break;
            case 'R': p.factors.push_back({PauliOp::R, 0.0}); break;
            default:
                throw std::invalid_argument("pauli_parse: bad letter '" +
                                            std::string(1, text[i]) + "'");
        }
    }
    return p;
}

} // namespace qca
