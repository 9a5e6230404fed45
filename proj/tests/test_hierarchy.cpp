#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmckit/hierarchy.hpp"
#include "cmckit/printed_tables.hpp"

using namespace cmckit;

namespace {
JetPolynomial Z(int j) { return JetPolynomial::z(j); }
}

TEST_CASE("seed level reconstructs the printed first rows") {
    Derivation der;
    Hierarchy hier(der);
    const HierarchyLevel& l0 = hier.level(0);
    CHECK(l0.A.isZero());
    CHECK(l0.B == JetPolynomial::gamma(1));
    CHECK(l0.C == JetPolynomial(GaussQ(-1)));
    CHECK(hier.pendingA() == GaussQ(1, 2) * Z(3));

    PaperFrameTriple t0 = hier.paperFrame(0);
    CHECK(t0.b.hWeight == -1);
    CHECK(t0.b.poly.scaled(t0.b.prefactor) == tables::paperLowerB(0));
    CHECK(t0.c.hWeight == 1);
    CHECK(t0.c.poly.scaled(t0.c.prefactor) == tables::paperLowerC(0));
    CHECK(t0.a.poly.isZero());
}

TEST_CASE("algebraic step reproduces the printed level-1 and level-2 rows") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(2);

    const HierarchyLevel& l1 = hier.level(1);
    CHECK(l1.A == GaussQ(1, 2) * Z(3));
    CHECK(l1.B == GaussQ(1, 2) * (Z(4) - GaussQ(5, 4) * Z(3).pow(2)));
    CHECK(l1.C == (GaussQ(1, 2) * (Z(4) - GaussQ(7, 4) * Z(3).pow(2))).shifted(-1, 0));
    CHECK(GaussQ(2) * hier.level(2).A == tables::paperLowerA(2));

    for (int n = 0; n <= 2; ++n) {
        PaperFrameTriple t = hier.paperFrame(n);
        CHECK(t.a.poly.scaled(t.a.prefactor) == tables::paperLowerA(n));
        CHECK(t.b.hWeight == -1);
        CHECK(t.b.poly.scaled(t.b.prefactor) == tables::paperLowerB(n));
        CHECK(t.c.hWeight == 1);
        CHECK(t.c.poly.scaled(t.c.prefactor) == tables::paperLowerC(n));
    }
}

TEST_CASE("integration recursion reproduces the gamma-free list") {
    Derivation der;
    Hierarchy hier(der);
    JetPolynomial a = Z(3);
    for (int level = 1; level <= 3; ++level) {
        a = hier.stepIntegration(a, 2 * level - 1);
        CHECK(a == tables::gammaFreeA(level + 1));
    }
}

TEST_CASE("cross-validation of the two recursions") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(4);
    // gamma-free tower equals (-gamma)^{n-1} * (2 A^{2n+1}); the constant is
    // pinned at n=1 (both towers monic there) and must not drift.
    JetPolynomial a = Z(3);
    for (int n = 1; n <= 4; ++n) {
        JetPolynomial scaled = hier.level(n).A.scaled(GaussQ(2)).shifted(n - 1, 0);
        if ((n - 1) % 2 == 1) scaled = -scaled;
        CHECK(a == scaled);
        if (n < 4) a = hier.stepIntegration(a, 2 * n - 1);
    }
}

TEST_CASE("verifyLevel runs the invariant suite") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(6);
    for (int n = 0; n <= 6; ++n) {
        LevelReport rep = hier.verifyLevel(n);
        for (const auto& f : rep.failures) MESSAGE("level ", n, ": ", f);
        CHECK(rep.ok);
    }
    for (int n = 1; n <= 6; ++n) {
        CHECK(hier.level(n).A.isHomogeneousOfWeight(2 * n - 1));
        CHECK(hier.level(n).B.isHomogeneousOfWeight(2 * n));
        CHECK(hier.level(n).C.isHomogeneousOfWeight(2 * n));
    }
}

TEST_CASE("corrupted coefficient fails the Jacobi check") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(2);
    HierarchyLevel bad = hier.level(2);
    bad.A += GaussQ(1, 100) * Z(3) * Z(4);
    CHECK_FALSE(der.jacobiE(GaussQ(2) * bad.A).isZero());
}

TEST_CASE("jacobiE annihilates the ladder; the index cap gates depth") {
    // Under the default cap (z_25) the ladder reaches level 11; the step to
    // level 12 would need z_26 and must fail loudly, never truncate.
    {
        Derivation der;
        Hierarchy hier(der);
        hier.extendTo(11);
        for (int n = 1; n <= 11; ++n) CHECK(der.jacobiE(GaussQ(2) * hier.level(n).A).isZero());
        CHECK_THROWS_AS(hier.extendTo(12), TruncationExceeded);
    }
    // Raising the cap extends the reach.
    DerivationRules wide;
    wide.hardCap = 30;
    Derivation der(wide);
    Hierarchy hier(der);
    hier.extendTo(12);
    for (int n = 1; n <= 12; ++n) CHECK(der.jacobiE(GaussQ(2) * hier.level(n).A).isZero());
}

TEST_CASE("resuming from persisted levels matches a fresh run") {
    Derivation der;
    Hierarchy fresh(der);
    fresh.extendTo(5);

    Hierarchy resumed(der);
    resumed.extendTo(3);
    std::vector<HierarchyLevel> saved(fresh.levels().begin(), fresh.levels().begin() + 4);
    resumed.resumeFrom(saved);
    resumed.extendTo(5);
    for (int n = 0; n <= 5; ++n) {
        CHECK(resumed.level(n).A == fresh.level(n).A);
        CHECK(resumed.level(n).B == fresh.level(n).B);
        CHECK(resumed.level(n).C == fresh.level(n).C);
    }
    CHECK(resumed.pendingA() == fresh.pendingA());
}
