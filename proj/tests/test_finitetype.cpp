#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmckit/closedsystem.hpp"
#include "cmckit/flatweb.hpp"
#include "cmckit/spectral.hpp"

using namespace cmckit;

namespace {

FiniteTypeSpec specM2(GaussQ U1 = GaussQ(0), GaussQ V1 = GaussQ(1)) {
    FiniteTypeSpec spec;
    spec.m = 2;
    spec.U = {std::move(U1)};
    spec.V = {std::move(V1)};
    return spec;
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(specM2().validate());
    CHECK_NOTHROW(specM2(GaussQ(1, 2), GaussQ::i()).validate());
    CHECK_THROWS_AS(specM2(GaussQ(0), GaussQ(2)).validate(), ConstantsNotAdapted);
    FiniteTypeSpec m3;
    m3.m = 3;
    m3.U = {GaussQ(1, 3), GaussQ(1, 2)};
    m3.V = {-(GaussQ(1) * GaussQ(1, 2).conj()), GaussQ(1)}; // V_1 = -V_2 conj(U_2)
    CHECK_NOTHROW(m3.validate());
    m3.V[0] = GaussQ(7);
    CHECK_THROWS_AS(m3.validate(), ConstantsNotAdapted);

    // The |V_{m-1}|^2 = gamma^2 regime carries its own numeric check.
    FiniteTypeSpec eleven = specM2(GaussQ(0), GaussQ(2));
    eleven.normalization = FtNormalization::SectionEleven;
    eleven.gammaSq = 4;
    CHECK_NOTHROW(eleven.validate());
    eleven.gammaSq = 9;
    CHECK_THROWS_AS(eleven.validate(), ConstantsNotAdapted);
}

TEST_CASE("killing field for m = 2 instantiates the constant table") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(1);
    LambdaMatrix X = buildKillingField(specM2(), hier);
    CHECK(X.degree == 3);
    REQUIRE(X.a.size() == 3);

    JetPolynomial z3 = JetPolynomial::z(3);
    const HierarchyLevel& l1 = hier.level(1);
    GaussQ I = GaussQ::i();

    CHECK(X.a[0].isZero());
    CHECK(X.a[1] == -z3);               // -a^3
    CHECK(X.a[2] == -z3.conj());        // -V_1 conj(a^3)
    CHECK(X.b[0] == JetPolynomial(I) * JetPolynomial::gamma(1));
    CHECK(X.b[1] == I * l1.B);          // i(B^4 - g U_1), U_1 = 0
    CHECK(X.b[2] == JetPolynomial(-I) * JetPolynomial::r(1));
    CHECK(X.c[0] == JetPolynomial(-I));
    CHECK(X.c[1] == I * l1.C);
    CHECK(X.c[2] == JetPolynomial(I) * JetPolynomial::gamma(1).shifted(0, -1));

    // trace-free entries
    auto e = X.entries();
    for (size_t k = 0; k < e[0][0].size(); ++k) CHECK(e[0][0][k] == -e[1][1][k]);
}

TEST_CASE("killing field degree profile and extremal entries, m = 3") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(2);
    FiniteTypeSpec spec;
    spec.m = 3;
    spec.U = {GaussQ(0), GaussQ(1, 2)};
    spec.V = {-GaussQ(1, 2), GaussQ(1)}; // V_1 = -V_2 conj(U_2)
    LambdaMatrix X = buildKillingField(spec, hier);
    CHECK(X.degree == 5);

    int top = 2 * spec.m - 2;
    CHECK(X.a[0].isZero());
    CHECK_FALSE(X.a[1].isZero());
    CHECK(X.a[1] == (-GaussQ(2)) * hier.level(1).A);
    CHECK(X.a[top] == (-GaussQ(2) * spec.V[1]) * hier.level(1).A.conj());
    CHECK(X.b[0] == JetPolynomial(GaussQ::i()) * JetPolynomial::gamma(1));
    CHECK(X.b[top] == JetPolynomial(-GaussQ::i() * spec.V[1]) * JetPolynomial::r(1));
    CHECK(X.c[0] == JetPolynomial(-GaussQ::i()));
    CHECK(X.c[top] == (GaussQ::i() * spec.V[1]) * JetPolynomial::gamma(1).shifted(0, -1));
}

TEST_CASE("m = 1 is rejected as the degenerate cylinder case") {
    Derivation der;
    Hierarchy hier(der);
    FiniteTypeSpec spec;
    spec.m = 1;
    CHECK_THROWS_AS(buildKillingField(spec, hier), ConstantsNotAdapted);
}

TEST_CASE("admissible states satisfy the transversal relation") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(3);
    FiniteTypeSpec spec = specM2(GaussQ(1, 3), GaussQ::i());
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(3));
    FiniteTypeState st = builder.fromZ3(GaussQ(mpq_class(1, 2), mpq_class(-1, 3)));

    // C4 + U1 - V1 r^{-1} conj(B4) + g V1 conj(U1) r^{-1} = 0
    GaussQ C4 = st.evaluate(hier.level(1).C);
    GaussQ B4 = st.evaluate(hier.level(1).B);
    GaussQ residual = C4 + spec.U[0] - spec.V[0] * B4.conj() / st.r +
                      st.gamma * spec.V[0] * spec.U[0].conj() / st.r;
    CHECK(residual.isZero());

    // The level-2 relation itself: a^5 = U1 a^3 + V1 conj(a^3).
    GaussQ a5 = GaussQ(2) * st.evaluate(hier.level(2).A);
    GaussQ a3 = GaussQ(2) * st.evaluate(hier.level(1).A);
    CHECK(a5 == spec.U[0] * a3 + spec.V[0] * a3.conj());
}

TEST_CASE("spectral polynomial invariants for m = 2") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(1);
    FiniteTypeSpec spec = specM2();
    LambdaMatrix X = buildKillingField(spec, hier);
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(1));
    FiniteTypeState st = builder.fromZ3(GaussQ(1, 2));

    SpectralReport rep = spectralPolynomial(X, st, spec);
    CHECK(rep.degree == 4);
    CHECK(rep.P0 == GaussQ(-8));   // -4 gamma
    CHECK(rep.Ptop == GaussQ(-8)); // -4 gamma V_1^2
    CHECK(rep.P[1].isZero());      // 8 gamma U_1 with U_1 = 0
    CHECK(rep.genusArithmetic == 2);
    CHECK(rep.rootsUnitCircleSymmetric);
    // Generic state: simple roots in inversion-symmetric pairs off the
    // unit circle, so the geometric genus saturates the arithmetic one.
    CHECK(rep.oddRootPairs == 2);
    CHECK(rep.genusGeometric == rep.genusArithmetic);

    // With U_1 != 0 the subleading coefficient is 8 gamma U_1.
    FiniteTypeSpec spec2 = specM2(GaussQ(1, 4), GaussQ::i());
    LambdaMatrix X2 = buildKillingField(spec2, hier);
    FiniteTypeStateBuilder b2(spec2, GaussQ(2), GaussQ(3));
    FiniteTypeState st2 = b2.fromZ3(GaussQ(mpq_class(1, 3), mpq_class(1, 5)));
    SpectralReport rep2 = spectralPolynomial(X2, st2, spec2);
    CHECK(rep2.P[1] == GaussQ(8) * st2.gamma * spec2.U[0]);
    CHECK(rep2.rootsUnitCircleSymmetric);
}

TEST_CASE("P(lambda) is a first integral: derivatives vanish on the locus") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(2);
    FiniteTypeSpec spec = specM2(GaussQ(1, 3), GaussQ::i());
    LambdaMatrix X = buildKillingField(spec, hier);
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(3, 2));
    LambdaPoly P = X.spectralPoly();
    for (const GaussQ& z3 : {GaussQ(1, 2), GaussQ(mpq_class(-2, 3), mpq_class(1, 4))}) {
        FiniteTypeState st = builder.fromZ3(z3);
        for (const auto& coeff : P) {
            CHECK(st.evaluate(der.dOmega(coeff)).isZero());
            CHECK(st.evaluate(der.dOmegaBar(coeff)).isZero());
        }
    }
}

TEST_CASE("P varies across leaves: the middle coefficient is a modulus") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(1);
    FiniteTypeSpec spec = specM2();
    LambdaMatrix X = buildKillingField(spec, hier);
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(1));
    SpectralReport repA = spectralPolynomial(X, builder.fromZ3(GaussQ(0)), spec);
    SpectralReport repB = spectralPolynomial(X, builder.fromZ3(GaussQ(2)), spec);
    CHECK(repA.P[2] == GaussQ(20));
    CHECK(repB.P[2] == GaussQ(32));
}

TEST_CASE("shift identity: the once-shifted relation holds with constant U0") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(3);
    FiniteTypeSpec spec = specM2(GaussQ(1, 3), GaussQ::i());
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(3, 2));

    // U0 = (B^6 - U1 B^4 + V1 r)/gamma must be flow-constant, and
    // a^7 = U1 a^5 + U0 a^3 (the conj(a^1) term vanishes).
    JetPolynomial U0fun =
        (hier.level(2).B - spec.U[0] * hier.level(1).B + spec.V[0] * JetPolynomial::r(1))
            .shifted(-1, 0);
    for (const GaussQ& z3 : {GaussQ(1, 2), GaussQ(mpq_class(1, 5), mpq_class(2, 3))}) {
        FiniteTypeState st = builder.fromZ3(z3);
        CHECK(st.evaluate(der.dOmega(U0fun)).isZero());
        CHECK(st.evaluate(der.dOmegaBar(U0fun)).isZero());
        GaussQ U0 = st.evaluate(U0fun);
        GaussQ a7 = GaussQ(2) * st.evaluate(hier.level(3).A);
        GaussQ a5 = GaussQ(2) * st.evaluate(hier.level(2).A);
        GaussQ a3 = GaussQ(2) * st.evaluate(hier.level(1).A);
        CHECK(a7 == spec.U[0] * a5 + U0 * a3);
    }
}

TEST_CASE("level-2 numeric flow conserves P(lambda), order 4") {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(1);
    FiniteTypeSpec spec = specM2();
    LambdaMatrix X = buildKillingField(spec, hier);
    FiniteTypeStateBuilder builder(spec, GaussQ(2), GaussQ(1));
    FiniteTypeState st = builder.fromZ3(GaussQ(1, 2));

    Level2Flow flow(spec, 4.0, 0.37);
    Level2Flow::State s0{st.r.re.get_d(),
                         {st.z.at(3).re.get_d(), st.z.at(3).im.get_d()},
                         {st.z.at(4).re.get_d(), st.z.at(4).im.get_d()}};
    PathReport full = flow.integrate(X, s0, 1.0, 1e-3, defaultLambdaSamples());
    CHECK(full.maxDriftP < 1e-8);
    CHECK(full.maxConstraintResidual < 1e-8);
    PathReport quarter = flow.integrate(X, s0, 0.25, 1e-3, defaultLambdaSamples());
    PathReport quarterHalved = flow.integrate(X, s0, 0.25, 5e-4, defaultLambdaSamples());
    if (quarterHalved.maxDriftP > 0)
        CHECK(quarter.maxDriftP / quarterHalved.maxDriftP >= 12.0);

    // gamma^2 <= 0 is rejected.
    CHECK_THROWS_AS(Level2Flow(spec, -1.0, 0.0), ConstantsNotAdapted);
}

TEST_CASE("closed structure systems formally satisfy d^2 = 0") {
    // Level 1, |V_1|^2 = gamma^2 branch (fully symbolic constants).
    FiniteTypeClosedSystem level1(1);
    D2Report rep1 = level1.d2Check();
    for (const auto& [var, res] : rep1.residuals) MESSAGE(var, ": ", res);
    CHECK(rep1.ok);

    // Level 1, |V_1|^2 != gamma^2 branch with B1 eliminated.
    Level1SecondBranch branch2;
    D2Report rep2 = branch2.d2Check();
    for (const auto& [var, res] : rep2.residuals) MESSAGE(var, ": ", res);
    CHECK(rep2.ok);

    // Levels 2..4 under the adapted constants.
    for (int n : {2, 3, 4}) {
        D2Report rep = FiniteTypeClosedSystem(n).d2Check();
        for (const auto& [var, res] : rep.residuals) MESSAGE("level ", n, " ", var, ": ", res);
        CHECK(rep.ok);
    }
}

TEST_CASE("level-1 closed system carries the restricted conservation laws") {
    // phi_1 restricted: (B1 + (A1)^2/4) omega - 2 r omegabar is closed under
    // the generic tables (no finite-type relation needed).
    FiniteTypeClosedSystem sys(2);
    SymPoly fo = SymPoly::sym("B1") + (SymPoly::sym("A1", 2)).scaled(GaussQ(1, 4));
    SymPoly fob = SymPoly::sym("r").scaled(GaussQ(-2));
    SymPoly residual = sys.derive(fob, false) - sys.derive(fo, true);
    CHECK(sys.reduce(residual).isZero());
}

TEST_CASE("flat 3-web: symbolic compatibility") {
    auto rep = flatweb::flatWebCheck();
    CHECK(rep.rhoSolve);
    CHECK(rep.dphiSolve);
    CHECK(rep.dCMatchesClosure);
    CHECK(rep.dphiCompatible);
    CHECK(rep.gaussCompatible);
    CHECK(flatweb::webRelationJetForm());
}

TEST_CASE("flat 3-web: numeric flow with order-4 identity residuals") {
    flatweb::FlatWebFlow flow(1.0);
    auto rep = flow.integrate(1.0, 1.0, 0.0, 0.4, 1e-3);
    CHECK(rep.maxGaussResidual < 1e-8);
    CHECK(rep.maxDphiResidual < 1e-8);
    auto repHalf = flow.integrate(1.0, 1.0, 0.0, 0.4, 5e-4);
    if (repHalf.maxGaussResidual > 0)
        CHECK(rep.maxGaussResidual / repHalf.maxGaussResidual >= 12.0);
    CHECK_THROWS_AS(flow.integrate(1.0, 1e-15, 0.0, 0.1, 1e-3), StepFailure);
}

TEST_CASE("root finder pairs roots against the unit circle") {
    // p(l) = (l^2 - 5/2 l + 1)(l^2 + 1): roots 2, 1/2, i, -i.
    std::vector<GaussQ> coeffs = {GaussQ(1), GaussQ(-5, 2), GaussQ(2), GaussQ(-5, 2), GaussQ(1)};
    auto roots = polynomialRoots(coeffs);
    REQUIRE(roots.size() == 4);
    CHECK(rootsSymmetricUnderInversion(roots, 1e-10));
}
