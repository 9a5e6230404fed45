#pragma once

#include "jetpoly.hpp"

// Frozen low-order reference expansions of the formal Killing coefficients
// and Jacobi fields. Everything here is input data for the verification
// suites, never a computation path.
namespace cmckit::tables {

namespace detail {
inline JetPolynomial Z(int j) { return JetPolynomial::z(j); }

inline JetPolynomial zterm(long num, long den, std::initializer_list<std::pair<int, int>> gens) {
    Monomial m;
    for (auto [j, e] : gens) m = m.times(Monomial::gen(zGen(j), e));
    return JetPolynomial::monomial(m, GaussQ(num, den));
}
} // namespace detail

// gamma-free Jacobi fields A^{2n+1}, n = levels 1..4 (A^3, A^5, A^7, A^9).
inline JetPolynomial gammaFreeA(int level) {
    using detail::zterm;
    switch (level) {
        case 1:
            return zterm(1, 1, {{3, 1}});
        case 2:
            return zterm(1, 1, {{5, 1}}) + zterm(-5, 1, {{3, 1}, {4, 1}}) + zterm(35, 8, {{3, 3}});
        case 3:
            return zterm(1, 1, {{7, 1}}) + zterm(-21, 2, {{3, 1}, {6, 1}}) +
                   zterm(-35, 2, {{4, 1}, {5, 1}}) + zterm(483, 8, {{3, 2}, {5, 1}}) +
                   zterm(651, 8, {{3, 1}, {4, 2}}) + zterm(-231, 1, {{3, 3}, {4, 1}}) +
                   zterm(15015, 128, {{3, 5}});
        case 4:
            return zterm(1, 1, {{9, 1}}) + zterm(-18, 1, {{3, 1}, {8, 1}}) +
                   zterm(-42, 1, {{4, 1}, {7, 1}}) + zterm(1419, 8, {{3, 2}, {7, 1}}) +
                   zterm(-63, 1, {{5, 1}, {6, 1}}) + zterm(2871, 4, {{3, 1}, {4, 1}, {6, 1}}) +
                   zterm(-19305, 16, {{3, 3}, {6, 1}}) + zterm(3597, 8, {{3, 1}, {5, 2}}) +
                   zterm(4851, 8, {{4, 2}, {5, 1}}) + zterm(-98241, 16, {{3, 2}, {4, 1}, {5, 1}}) +
                   zterm(770055, 128, {{3, 4}, {5, 1}}) + zterm(-22165, 8, {{3, 1}, {4, 3}}) +
                   zterm(1044615, 64, {{3, 3}, {4, 2}}) + zterm(-2807805, 128, {{3, 5}, {4, 1}}) +
                   zterm(8083075, 1024, {{3, 7}});
        default:
            throw std::out_of_range("gammaFreeA: level not tabulated");
    }
}

// Lower-case frame rows a^{2n+1}, with the gamma-Laurent coefficients made
// explicit: a^3 = z3, a^5 = -(1/g)(z5 - 5 z4 z3 + 35/8 z3^3).
inline JetPolynomial paperLowerA(int n) {
    using detail::Z;
    switch (n) {
        case 0:
            return {};
        case 1:
            return Z(3);
        case 2:
            return (-(Z(5) - GaussQ(5) * Z(4) * Z(3) + GaussQ(35, 8) * Z(3).pow(3))).shifted(-1, 0);
        default:
            throw std::out_of_range("paperLowerA: n not tabulated");
    }
}

// b^{2n+2} rows divided by h2^{-1/2} (the h-weight is carried separately):
// b^2 = -i g, b^4 = -(i/2)(z4 - 5/4 z3^2),
// b^6 = (i/2g)(z6 - 7 z5 z3 - 21/4 z4^2 + 231/8 z4 z3^2 - 1155/64 z3^4).
inline JetPolynomial paperLowerB(int n) {
    using detail::Z;
    const GaussQ i = GaussQ::i();
    switch (n) {
        case 0:
            return ((-i) * JetPolynomial::gamma(1));
        case 1:
            return (GaussQ(-1, 2) * i) * (Z(4) - GaussQ(5, 4) * Z(3).pow(2));
        case 2:
            return ((GaussQ(1, 2) * i) *
                    (Z(6) - GaussQ(7) * Z(5) * Z(3) - GaussQ(21, 4) * Z(4).pow(2) +
                     GaussQ(231, 8) * Z(4) * Z(3).pow(2) - GaussQ(1155, 64) * Z(3).pow(4)))
                .shifted(-1, 0);
        default:
            throw std::out_of_range("paperLowerB: n not tabulated");
    }
}

// c^{2n+2} rows divided by h2^{1/2}: c^2 = i, c^4 = -(i/2g)(z4 - 7/4 z3^2),
// c^6 = (i/2g^2)(z6 - 8 z5 z3 - 19/4 z4^2 + 259/8 z4 z3^2 - 1365/64 z3^4).
inline JetPolynomial paperLowerC(int n) {
    using detail::Z;
    const GaussQ i = GaussQ::i();
    switch (n) {
        case 0:
            return JetPolynomial(i);
        case 1:
            return ((GaussQ(-1, 2) * i) * (Z(4) - GaussQ(7, 4) * Z(3).pow(2))).shifted(-1, 0);
        case 2:
            return ((GaussQ(1, 2) * i) *
                    (Z(6) - GaussQ(8) * Z(5) * Z(3) - GaussQ(19, 4) * Z(4).pow(2) +
                     GaussQ(259, 8) * Z(4) * Z(3).pow(2) - GaussQ(1365, 64) * Z(3).pow(4)))
                .shifted(-2, 0);
        default:
            throw std::out_of_range("paperLowerC: n not tabulated");
    }
}

// Deformation rows: adot^3 = a^3 - 4 w1,
// bdot^4 = 3 b^4 + (i/8) h2^{-1/2} (16 w2 + u0 (5 z3^2 - 4 z4)),
// cdot^4 = c^4 + (i/8g) h2^{1/2} (16 w2 - 16 w1 z3 + u0 (-7 z3^2 + 4 z4)),
// adot^5 = 3 a^5 - (1/2g)(-8 w3 + 12 w2 z3 + w1 (-5 z3^2 + 4 z4)).
inline JetPolynomial dotCorrectionA(int n) {
    using detail::Z;
    JetPolynomial w1 = JetPolynomial::w(1), w2 = JetPolynomial::w(2), w3 = JetPolynomial::w(3);
    switch (n) {
        case 1:
            return GaussQ(-4) * w1;
        case 2:
            return (GaussQ(-1, 2) *
                    (GaussQ(-8) * w3 + GaussQ(12) * w2 * Z(3) +
                     w1 * (GaussQ(-5) * Z(3).pow(2) + GaussQ(4) * Z(4))))
                .shifted(-1, 0);
        default:
            throw std::out_of_range("dotCorrectionA: n not tabulated");
    }
}

inline int dotScaleA(int n) { return 2 * n - 1; } // adot^{2n+1} = (2n-1) a^{2n+1} + correction

inline JetPolynomial dotCorrectionB1() {
    using detail::Z;
    return (GaussQ(1, 8) * GaussQ::i()) *
           (GaussQ(16) * JetPolynomial::w(2) +
            JetPolynomial::w(0) * (GaussQ(5) * Z(3).pow(2) - GaussQ(4) * Z(4)));
}

inline JetPolynomial dotCorrectionC1() {
    using detail::Z;
    return ((GaussQ(1, 8) * GaussQ::i()) *
            (GaussQ(16) * JetPolynomial::w(2) - GaussQ(16) * JetPolynomial::w(1) * Z(3) +
             JetPolynomial::w(0) * (GaussQ(-7) * Z(3).pow(2) + GaussQ(4) * Z(4))))
        .shifted(-1, 0);
}

// psi_1 = -2i [ ((-w2 + w1 z3)/g) omega + (g u0 / r) omegabar ].
inline std::pair<JetPolynomial, JetPolynomial> psi1Components() {
    using detail::Z;
    GaussQ m2i = GaussQ(-2) * GaussQ::i();
    JetPolynomial fo =
        m2i * ((-JetPolynomial::w(2) + JetPolynomial::w(1) * Z(3)).shifted(-1, 0));
    JetPolynomial fob = m2i * JetPolynomial::w(0).shifted(1, -1);
    return {fo, fob};
}

// psi_2 = (i/4) [ (1/g^2)(-8 w4 + 28 w3 z3 - 35 w2 z3^2 + 35 w1 z3^3
//                 - 40 w1 z3 z4 + 12 w2 z4 + 8 w1 z5) omega
//               + (1/r)(8 w2 + 5 u0 z3^2 - 4 u0 z4) omegabar ].
inline std::pair<JetPolynomial, JetPolynomial> psi2Components() {
    using detail::Z;
    GaussQ i4 = GaussQ(1, 4) * GaussQ::i();
    JetPolynomial w1 = JetPolynomial::w(1), w2 = JetPolynomial::w(2), w3 = JetPolynomial::w(3),
                  w4 = JetPolynomial::w(4), u0 = JetPolynomial::w(0);
    JetPolynomial fo = i4 * ((GaussQ(-8) * w4 + GaussQ(28) * w3 * Z(3) -
                              GaussQ(35) * w2 * Z(3).pow(2) + GaussQ(35) * w1 * Z(3).pow(3) -
                              GaussQ(40) * w1 * Z(3) * Z(4) + GaussQ(12) * w2 * Z(4) +
                              GaussQ(8) * w1 * Z(5))
                                 .shifted(-2, 0));
    JetPolynomial fob =
        i4 * ((GaussQ(8) * w2 + GaussQ(5) * u0 * Z(3).pow(2) - GaussQ(4) * u0 * Z(4))
                  .shifted(0, -1));
    return {fo, fob};
}

} // namespace cmckit::tables
