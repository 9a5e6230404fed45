#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include "cmckit/derivation.hpp"
#include "cmckit/jetjson.hpp"
#include "cmckit/solve.hpp"
#include "test_util.hpp"

using namespace cmckit;

namespace {

JetPolynomial Z(int j) { return JetPolynomial::z(j); }
JetPolynomial G(int e) { return JetPolynomial::gamma(e); }
JetPolynomial R(int e) { return JetPolynomial::r(e); }

// Independent xi-frame oracle for the T_j tower: polynomials in gamma^2,
// h2bar and the h_j, with d_xi h_j = h_{j+1}, d_xi h2bar = 0, and the
// recursion T_3 = R h_2, T_{j+1} = d_xi T_j + (j/2) R h_j, R = g^2 - h2 h2bar.
struct HMono {
    int gamma2 = 0;          // exponent of gamma^2
    int hbar2 = 0;           // exponent of h2bar
    std::map<int, int> h;    // h_index -> exponent, index >= 2

    friend auto operator<=>(const HMono&, const HMono&) = default;
    HMono times(const HMono& o) const {
        HMono out = *this;
        out.gamma2 += o.gamma2;
        out.hbar2 += o.hbar2;
        for (auto [i, e] : o.h)
            if ((out.h[i] += e) == 0) out.h.erase(i);
        return out;
    }
};

struct HPoly {
    std::map<HMono, mpq_class> terms;
    void add(const HMono& m, const mpq_class& c) {
        if (c == 0) return;
        auto [it, ins] = terms.try_emplace(m, c);
        if (!ins && (it->second += c) == 0) terms.erase(it);
    }
    HPoly times(const HPoly& o) const {
        HPoly out;
        for (const auto& [m1, c1] : terms)
            for (const auto& [m2, c2] : o.terms) out.add(m1.times(m2), c1 * c2);
        return out;
    }
    static HPoly hGen(int i) {
        HPoly p;
        HMono m;
        m.h[i] = 1;
        p.add(m, 1);
        return p;
    }
    static HPoly curvature() { // R = gamma^2 - h2 h2bar
        HPoly p;
        HMono g;
        g.gamma2 = 1;
        p.add(g, 1);
        HMono hh;
        hh.hbar2 = 1;
        hh.h[2] = 1;
        p.add(hh, -1);
        return p;
    }
    HPoly dXi() const {
        HPoly out;
        for (const auto& [m, c] : terms) {
            for (auto [i, e] : m.h) {
                HMono n = m;
                if (--n.h[i] == 0) n.h.erase(i);
                ++n.h[i + 1];
                out.add(n, c * e);
            }
        }
        return out;
    }
};

// Convert h1^{-(j-1)} T_j into the z-frame ring; asserts the h2-excess
// matches the h2bar count so the result lands in Q[g^2, r^2, z].
JetPolynomial scaledToZ(const HPoly& t, int j) {
    JetPolynomial out;
    for (const auto& [m, c] : t.terms) {
        int num = -(j - 1); // running h2-exponent, in units of h2^{1/2}
        Monomial zm(2 * m.gamma2, 0);
        for (auto [i, e] : m.h) {
            if (i == 2) {
                num += 2 * e;
            } else {
                num += i * e;
                zm = zm.times(Monomial::gen(zGen(i), e));
            }
        }
        REQUIRE(num % 2 == 0);
        REQUIRE(num / 2 == m.hbar2);
        zm.rExp = 2 * m.hbar2;
        out.addTerm(zm, GaussQ(c));
    }
    return out;
}

JetPolynomial oracleThat(int j) {
    HPoly t = HPoly::curvature().times(HPoly::hGen(2)); // T_3
    for (int i = 3; i < j; ++i) {
        HPoly next = t.dXi();
        HPoly corr = HPoly::curvature().times(HPoly::hGen(i));
        for (auto& [m, c] : corr.terms) next.add(m, c * mpq_class(i, 2));
        t = next;
    }
    return scaledToZ(t, j);
}

} // namespace

TEST_CASE("ring arithmetic") {
    CHECK(Z(3) * Z(3) == JetPolynomial::monomial(Monomial::gen(zGen(3), 2)));
    CHECK(G(1) * G(-1) == JetPolynomial(1));
    CHECK((Z(4) - GaussQ(3, 2) * Z(3).pow(2)) * Z(3) ==
          Z(3) * Z(4) - GaussQ(3, 2) * Z(3).pow(3));

    testutil::RandomJet rnd(20240811);
    for (int i = 0; i < 50; ++i) {
        JetPolynomial a = rnd.poly(), b = rnd.poly(), c = rnd.poly();
        CHECK(a * b == b * a);
        CHECK((a + b) * c == a * c + b * c);
        CHECK((a * b) * c == a * (b * c));
    }
}

TEST_CASE("canonical form and weight report") {
    JetPolynomial p = Z(3) - Z(3);
    CHECK(p.isZero());
    WeightReport rep = p.weightReport();
    CHECK(rep.homogeneous);
    CHECK_FALSE(rep.weight.has_value());

    JetPolynomial q = Z(5) - GaussQ(5) * Z(3) * Z(4);
    rep = q.weightReport();
    CHECK(rep.homogeneous);
    CHECK(rep.weight == 3);
    CHECK_FALSE((q + Z(3)).weightReport().homogeneous);
}

TEST_CASE("that examples and oracle") {
    Derivation der;
    CHECK(der.that(3) == G(2) - R(2));
    CHECK(der.that(4) == (GaussQ(5, 2) * G(2) - GaussQ(7, 2) * R(2)) * Z(3));
    for (int j = 3; j <= 7; ++j) CHECK(der.that(j) == oracleThat(j));
    // T^_j support and homogeneity (only r^2, g^2, z_3..z_{j-1}).
    for (int j = 3; j <= 9; ++j) {
        const JetPolynomial& t = der.that(j);
        CHECK(t.isHomogeneousOfWeight(j - 3));
        for (const auto& [m, c] : t.terms()) {
            CHECK(m.gammaExp % 2 == 0);
            CHECK(m.rExp % 2 == 0);
            CHECK(m.gammaExp >= 0);
            CHECK(m.rExp >= 0);
            for (const auto& [g, e] : m.exps) {
                CHECK(g.kind == GenKind::Z);
                CHECK(g.index <= j - 1);
            }
        }
    }
}

TEST_CASE("dOmega generator rules") {
    Derivation der;
    CHECK(der.dOmega(Z(3)) == Z(4) - GaussQ(3, 2) * Z(3).pow(2));
    CHECK(der.dOmega(R(2)) == R(2) * Z(3));
    CHECK(der.dOmega(Z(4) - GaussQ(5, 4) * Z(3).pow(2)) ==
          Z(5) - GaussQ(9, 2) * Z(3) * Z(4) + GaussQ(15, 4) * Z(3).pow(3));
}

TEST_CASE("dOmegaBar generator rules") {
    Derivation der;
    CHECK(der.dOmegaBar(Z(3)) == (G(2) - R(2)).shifted(0, -1));
    CHECK(der.dOmegaBar(G(1)).isZero());
    CHECK(der.dOmegaBar(Z(4) - GaussQ(7, 4) * Z(3).pow(2)) ==
          -(G(2).shifted(0, -1) * Z(3)));
}

TEST_CASE("Leibniz property, randomized") {
    Derivation der;
    testutil::RandomJet rnd(7);
    for (int i = 0; i < 100; ++i) {
        JetPolynomial p = rnd.poly(2, true, true), q = rnd.poly(2, true, true);
        CHECK(der.dOmega(p * q) == der.dOmega(p) * q + p * der.dOmega(q));
        CHECK(der.dOmegaBar(p * q) == der.dOmegaBar(p) * q + p * der.dOmegaBar(q));
    }
}

TEST_CASE("derivations commute on the invariant ring") {
    Derivation der;
    testutil::RandomJet rnd(99);
    for (int i = 0; i < 25; ++i) {
        JetPolynomial p = rnd.poly(2, true, true);
        CHECK(der.dOmega(der.dOmegaBar(p)) == der.dOmegaBar(der.dOmega(p)));
    }
}

TEST_CASE("derivations shift spectral weight by +-1") {
    Derivation der;
    for (int w = 1; w <= 5; ++w) {
        for (const Monomial& m : basis::zPure(w, w + 2)) {
            JetPolynomial p = JetPolynomial::monomial(m);
            JetPolynomial up = der.dOmega(p), down = der.dOmegaBar(p);
            if (!up.isZero()) CHECK(up.isHomogeneousOfWeight(w + 1));
            if (!down.isZero()) CHECK(down.isHomogeneousOfWeight(w - 1));
            CHECK(der.jacobiE(p).isHomogeneousOfWeight(w));
        }
    }
}

TEST_CASE("jacobiE examples") {
    Derivation der;
    CHECK(der.jacobiE(Z(3)).isZero());
    CHECK(der.jacobiE(JetPolynomial(1)) == GaussQ(1, 2) * (G(2) + R(2)));
    JetPolynomial e4 = der.jacobiE(Z(4));
    CHECK_FALSE(e4.isZero());
    // Cross-check with E(z_j) = T^_{j+1} - (j/2)(T^_3 z_j + T^_j z_3) + (1/2)(g^2+r^2) z_j.
    JetPolynomial viaIdentity = der.that(5) -
                             GaussQ(2) * (der.that(3) * Z(4) + der.that(4) * Z(3)) +
                             GaussQ(1, 2) * ((G(2) + R(2)) * Z(4));
    CHECK(e4 == viaIdentity);
}

TEST_CASE("truncation cap is an error, never silent") {
    DerivationRules rules;
    rules.hardCap = 5;
    Derivation der(rules);
    CHECK_NOTHROW(der.dOmega(Z(4)));
    CHECK_THROWS_AS(der.dOmega(Z(5)), TruncationExceeded);
    CHECK_THROWS_AS(der.dOmega(JetPolynomial::w(5)), TruncationExceeded);
}

TEST_CASE("antiderivativeOmegaBar examples") {
    Derivation der;
    JetSolver solver(der);

    auto c = solver.antiderivativeOmegaBar(G(2).shifted(0, -1) * Z(3), 2);
    REQUIRE_FALSE(c.obstructed());
    CHECK(*c.witness == -Z(4) + GaussQ(7, 4) * Z(3).pow(2));

    auto zero = solver.antiderivativeOmegaBar(JetPolynomial(), 4);
    REQUIRE_FALSE(zero.obstructed());
    CHECK(zero.witness->isZero());

    auto z3 = solver.antiderivativeOmegaBar((G(2) - R(2)).shifted(0, -1), 1);
    REQUIRE_FALSE(z3.obstructed());
    CHECK(*z3.witness == Z(3));
}

TEST_CASE("antiderivativeOmegaBar is a section of dOmegaBar") {
    Derivation der;
    JetSolver solver(der);
    testutil::RandomJet rnd(13);
    for (int w = 2; w <= 5; ++w) {
        // Random z-pure polynomial, push forward, pull back.
        JetPolynomial p;
        for (const Monomial& m : basis::zPure(w, w + 2)) p.addTerm(m, rnd.scalar());
        JetPolynomial target = der.dOmegaBar(p);
        auto back = solver.antiderivativeOmegaBar(target, w);
        REQUIRE_FALSE(back.obstructed());
        CHECK(der.dOmegaBar(*back.witness) == target);
        CHECK(*back.witness == p);
    }
}

TEST_CASE("jointAntiderivative on exact forms") {
    Derivation der;
    JetSolver solver(der);
    for (JetPolynomial f : {Z(3), Z(3) * Z(4)}) {
        auto res = solver.jointAntiderivative(der.dOmega(f), der.dOmegaBar(f));
        REQUIRE_FALSE(res.obstructed());
        CHECK(der.dOmega(*res.witness) == der.dOmega(f));
        CHECK(der.dOmegaBar(*res.witness) == der.dOmegaBar(f));
    }
}

TEST_CASE("holomorphicKernel is empty in positive weight") {
    Derivation der;
    JetSolver solver(der);
    for (int w = 1; w <= 8; ++w) CHECK(solver.holomorphicKernel(w, 10).empty());
    CHECK_THROWS_AS(solver.holomorphicKernel(0, 10), std::invalid_argument);
}

TEST_CASE("json round-trip is bit-exact") {
    testutil::RandomJet rnd(5);
    for (int i = 0; i < 25; ++i) {
        JetPolynomial p = rnd.poly(4, true, true);
        json j = toJson(p);
        CHECK(jetFromJson(j) == p);
        CHECK(toJson(jetFromJson(j)).dump() == j.dump());
    }
    JetPolynomial big = JetPolynomial::monomial(
        Monomial::gen(zGen(3)), GaussQ(mpq_class(mpz_class("123456789012345678901234567890"),
                                                 mpz_class("987654321098765432109876543211")),
                                       mpq_class(-7, 3)));
    CHECK(jetFromJson(toJson(big)) == big);
}

TEST_CASE("memo table tolerates concurrent readers and writers") {
    DerivationRules rules;
    std::vector<std::thread> threads;
    std::atomic<bool> ok{true};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&ok, rules] {
            Derivation der(rules);
            JetPolynomial expected = der.that(12);
            for (int i = 0; i < 5; ++i)
                if (der.that(12) != expected) ok = false;
        });
    }
    for (auto& th : threads) th.join();
    CHECK(ok.load());
    Derivation der;
    CHECK(der.that(12).isHomogeneousOfWeight(9));
}

TEST_CASE("wbar_0 is not a legal generator (u is real)") {
    CHECK_THROWS_AS(wbGen(0), std::invalid_argument);
    CHECK(wGen(0).conj() == wGen(0));
    Derivation der;
    CHECK(der.dOmegaBar(JetPolynomial::w(0)) == JetPolynomial::wb(1));
}
