#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmckit/hierarchy.hpp"
#include "cmckit/pdebridge.hpp"
#include "test_util.hpp"

using namespace cmckit;

namespace {
JetPolynomial Z(int j) { return JetPolynomial::z(j); }
JetPolynomial U(int k) { return JetPolynomial::w(k); }
}

TEST_CASE("dictionary on the generators") {
    PdeBridge bridge;
    CHECK(bridge.dictionary(Z(3)) == GaussQ(-4) * U(1));
    CHECK(bridge.dictionary(Z(4)) == GaussQ(-4) * U(2) + GaussQ(24) * U(1).pow(2));
    // z4 - 3/2 z3^2 -> -4 u2 directly.
    CHECK(bridge.dictionary(Z(4) - GaussQ(3, 2) * Z(3).pow(2)) == GaussQ(-4) * U(2));
}

TEST_CASE("dictionary preserves weights on the Jacobi ladder") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(4);
    PdeBridge bridge;
    for (int n = 1; n <= 4; ++n) {
        JetPolynomial img = bridge.dictionary(hier.level(n).A.shifted(n - 1, 0));
        CHECK(img.isHomogeneousOfWeight(2 * n - 1));
    }
}

TEST_CASE("dictionary is a ring homomorphism") {
    PdeBridge bridge;
    testutil::RandomJet rnd(31);
    for (int i = 0; i < 30; ++i) {
        JetPolynomial p = rnd.poly(3, false), q = rnd.poly(3, false);
        CHECK(bridge.dictionary(p * q) == bridge.dictionary(p) * bridge.dictionary(q));
        CHECK(bridge.dictionary(p + q) == bridge.dictionary(p) + bridge.dictionary(q));
    }
}

TEST_CASE("triangular system round-trips") {
    PdeBridge bridge;
    for (int j = 1; j <= 8; ++j) CHECK(bridge.roundTrip(j) == U(j));
}

TEST_CASE("source term ladder") {
    PdeBridge bridge;
    auto S1 = PdeBridge::sourceTerm();
    CHECK(S1.plus == GaussQ(1, 4) * JetPolynomial::gamma(2));
    CHECK(S1.minus == JetPolynomial(GaussQ(-1, 4)));

    auto S2 = PdeBridge::sourceTermDerivative(2);
    CHECK(S2.plus == GaussQ(1, 2) * (JetPolynomial::gamma(2) * U(1)));
    CHECK(S2.minus == GaussQ(1, 2) * U(1));

    auto S3 = PdeBridge::sourceTermDerivative(3);
    CHECK(S3.plus == GaussQ(1, 2) * (JetPolynomial::gamma(2) * U(2)) +
                         JetPolynomial::gamma(2) * U(1).pow(2));
    CHECK(S3.minus == GaussQ(1, 2) * U(2) - U(1).pow(2));

    CHECK(PdeBridge::totalDz(U(1).pow(2)) == GaussQ(2) * (U(1) * U(2)));
}
