// Command-line front end: reproducible runs over the jet-ring toolkit with
// JSON artifacts. Every run is fully determined by its flags and seed.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

#include "cmckit/closedsystem.hpp"
#include "cmckit/deformation.hpp"
#include "cmckit/flatweb.hpp"
#include "cmckit/jetjson.hpp"
#include "cmckit/oneform.hpp"
#include "cmckit/pdebridge.hpp"
#include "cmckit/spectral.hpp"
#include "cmckit/umbilic.hpp"

using namespace cmckit;

namespace {

constexpr uint64_t kDefaultSeed = 20240810u;

struct FailureList {
    json failures = json::array();
    void add(const std::string& invariant, const std::string& detail) {
        failures.push_back({{"invariant", invariant}, {"detail", detail}});
    }
    bool empty() const { return failures.empty(); }
};

void writeArtifact(const std::string& path, const json& doc) {
    if (path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << doc.dump(2) << "\n";
}

int finish(const FailureList& failures, const std::string& label) {
    if (failures.empty()) {
        std::cout << label << ": all checks passed\n";
        return 0;
    }
    json doc{{"schema", "1"}, {"failures", failures.failures}};
    std::cerr << doc.dump(2) << "\n";
    return 1;
}

json paperFrameJson(const PaperFrameTriple& t) {
    return json{{"a", {{"prefactor", toJson(t.a.prefactor)}, {"hWeight", t.a.hWeight},
                       {"poly", toJson(t.a.poly)}}},
                {"b", {{"prefactor", toJson(t.b.prefactor)}, {"hWeight", t.b.hWeight},
                       {"poly", toJson(t.b.poly)}}},
                {"c", {{"prefactor", toJson(t.c.prefactor)}, {"hWeight", t.c.hWeight},
                       {"poly", toJson(t.c.poly)}}}};
}

json hierarchyJson(const Hierarchy& hier) {
    json levels = json::array();
    for (const auto& l : hier.levels()) {
        levels.push_back({{"n", l.n},
                          {"A", toJson(l.A)},
                          {"B", toJson(l.B)},
                          {"C", toJson(l.C)},
                          {"paperFrame", paperFrameJson(hier.paperFrame(l.n))}});
    }
    return json{{"schema", "1"}, {"levels", levels}};
}

GaussQ gaussFromSpecString(const std::string& s) {
    // "a/b" real or "a/b,c/d" complex.
    auto parseQ = [](const std::string& part) {
        mpq_class q(part);
        q.canonicalize();
        return q;
    };
    auto comma = s.find(',');
    if (comma == std::string::npos) return GaussQ(parseQ(s));
    return GaussQ(parseQ(s.substr(0, comma)), parseQ(s.substr(comma + 1)));
}

int runHierarchy(int depth, const std::string& method, const std::string& out, bool resume) {
    Derivation der;
    Hierarchy hier(der);
    if (resume && !out.empty()) {
        std::ifstream is(out);
        if (is) {
            std::vector<HierarchyLevel> levels;
            json doc = json::parse(is);
            for (const auto& lj : doc.at("levels")) {
                HierarchyLevel l;
                l.n = lj.at("n").get<int>();
                l.A = jetFromJson(lj.at("A"));
                l.B = jetFromJson(lj.at("B"));
                l.C = jetFromJson(lj.at("C"));
                levels.push_back(std::move(l));
            }
            hier.resumeFrom(std::move(levels));
        }
    }
    // Persist after every step so long runs are resumable.
    while (hier.depth() < depth) {
        hier.extendTo(hier.depth() + 1);
        if (!out.empty()) writeArtifact(out, hierarchyJson(hier));
    }
    FailureList failures;
    // Verification of distinct levels is embarrassingly parallel; merge the
    // reports in level order for deterministic output.
    std::vector<std::future<LevelReport>> reports;
    for (int n = 0; n <= depth; ++n)
        reports.push_back(std::async(std::launch::async,
                                     [&hier, n] { return hier.verifyLevel(n); }));
    for (int n = 0; n <= depth; ++n) {
        LevelReport rep = reports[n].get();
        for (const auto& f : rep.failures)
            failures.add("hierarchy.level" + std::to_string(n), f);
    }
    if (method == "both") {
        JetPolynomial a = JetPolynomial::z(3);
        for (int n = 1; n <= depth; ++n) {
            JetPolynomial scaled = hier.level(n).A.scaled(GaussQ(2)).shifted(n - 1, 0);
            if ((n - 1) % 2 == 1) scaled = -scaled;
            if (a != scaled)
                failures.add("hierarchy.crossMethod",
                             "integration tower disagrees at level " + std::to_string(n));
            if (n < depth) a = hier.stepIntegration(a, 2 * n - 1);
        }
    }
    writeArtifact(out, hierarchyJson(hier));
    return finish(failures, "hierarchy depth " + std::to_string(depth) + " (" + method + ")");
}

int runVerify(const std::string& file, const std::string& checks) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file);
    json doc = json::parse(is);
    Derivation der;
    FailureList failures;
    bool doJacobi = checks.find("jacobi") != std::string::npos;
    bool doWeights = checks.find("weights") != std::string::npos;
    bool doClosed = checks.find("closedness") != std::string::npos;

    std::vector<HierarchyLevel> levels;
    for (const auto& lj : doc.at("levels")) {
        HierarchyLevel l;
        l.n = lj.at("n").get<int>();
        l.A = jetFromJson(lj.at("A"));
        l.B = jetFromJson(lj.at("B"));
        l.C = jetFromJson(lj.at("C"));
        levels.push_back(std::move(l));
    }
    for (const auto& l : levels) {
        std::string tag = ".level" + std::to_string(l.n);
        if (doJacobi && !der.jacobiE(GaussQ(2) * l.A).isZero())
            failures.add("jacobi" + tag, "jacobiE(a^{2n+1}) != 0");
        if (doWeights && l.n >= 1) {
            if (!l.A.isHomogeneousOfWeight(2 * l.n - 1))
                failures.add("weights" + tag, "A weight != 2n-1");
            if (!l.B.isHomogeneousOfWeight(2 * l.n) || !l.C.isHomogeneousOfWeight(2 * l.n))
                failures.add("weights" + tag, "B/C weight != 2n");
        }
        if (doClosed) {
            JetPolynomial mid = -(JetPolynomial::gamma(1).shifted(0, -1) * l.A);
            if (der.dOmegaBar(l.C) != mid)
                failures.add("closedness" + tag, "dOmegaBar(C^{2n+2}) != -g r^{-1} A^{2n+1}");
            if (der.dOmegaBar(l.B) != -(JetPolynomial::r(1) * l.A))
                failures.add("closedness" + tag, "dOmegaBar(B^{2n+2}) != -r A^{2n+1}");
        }
    }
    return finish(failures, "verify " + file + " [" + checks + "]");
}

int runCvlaws(int maxN, const std::string& out) {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(maxN + 1);
    JetSolver solver(der);
    FailureList failures;
    json rows = json::array();
    for (int n = 0; n <= maxN; ++n) {
        OneForm pn = phi(n, hier);
        bool closed = isClosed(pn, der);
        bool nonExact = n <= 4 ? isExact(pn, der).nonExact() : true;
        if (!closed) failures.add("cvlaws.closedness", "phi_" + std::to_string(n));
        if (n <= 4 && !nonExact) failures.add("cvlaws.nontriviality", "phi_" + std::to_string(n));
        rows.push_back({{"n", n},
                        {"closed", closed},
                        {"exact", n <= 4 ? json(!nonExact) : json(nullptr)},
                        {"weight", 2 * n - 1},
                        {"generatingJacobiField", "a^" + std::to_string(2 * n + 3)},
                        {"fOmega", toJson(pn.fOmega)},
                        {"fOmegaBar", toJson(pn.fOmegaBar)}});
    }
    writeArtifact(out, json{{"schema", "1"}, {"report", rows}});
    return finish(failures, "cvlaws through n = " + std::to_string(maxN));
}

int runUmbilic(int p, int order, uint64_t seed, int maxN, const std::string& out) {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(std::max(1, maxN));
    UmbilicModel model = UmbilicModel::random(p, order, mpq_class(2), seed);
    SurfaceJets jets(model, 2 * maxN + 2);
    FailureList failures;
    json rows = json::array();
    for (int n = 0; n <= maxN; ++n) {
        UmbilicExpansion e = expandPhi(n, model, jets, hier);
        GaussQ res;
        bool epsIndependent = true;
        try {
            res = residue(e);
        } catch (const EpsilonDependent&) {
            epsIndependent = false;
            failures.add("umbilic.epsIndependence", "phi_" + std::to_string(n));
        }
        int dwVal = e.dwPart.isZero() ? 0 : e.dwPart.valuation();
        int dwbVal = e.dwBarPart.isZero() ? 0 : e.dwBarPart.valuation();
        if (!e.dwPart.isZero() && dwVal < poleBoundPhiDw(n, p))
            failures.add("umbilic.poleBound", "dw-part of phi_" + std::to_string(n));
        if (!e.dwBarPart.isZero() && dwbVal < poleBoundPhiDwBar(n, p))
            failures.add("umbilic.poleBound", "dwbar-part of phi_" + std::to_string(n));
        rows.push_back({{"n", n},
                        {"residue", epsIndependent ? toJson(res) : json(nullptr)},
                        {"dwValuation", dwVal},
                        {"dwBarValuation", dwbVal},
                        {"poleBoundDw", poleBoundPhiDw(n, p)},
                        {"poleBoundDwBar", poleBoundPhiDwBar(n, p)},
                        {"seriesClosed", seriesClosed(e)}});
        std::cout << "phi_" << n << "  residue "
                  << (epsIndependent ? res.str() : std::string("(eps-dependent)"))
                  << "  dw-valuation " << dwVal << " >= " << poleBoundPhiDw(n, p) << "\n";
    }
    if (maxN >= 1) {
        UmbilicExpansion machine = expandPhi(1, model, jets, hier);
        UmbilicExpansion closed = phi1ClosedForm(model, jets);
        if (residue(machine) != residue(closed))
            failures.add("umbilic.phi1ClosedForm", "residue mismatch");
    }
    writeArtifact(out, json{{"schema", "1"},
                            {"p", p},
                            {"order", order},
                            {"seed", seed},
                            {"chart", "w with z = w^2; even p doubles residues"},
                            {"report", rows}});
    return finish(failures, "umbilic p=" + std::to_string(p));
}

int runFiniteType(int level, const std::string& constantsFile, const std::string& stateFile,
                  double integrateLength, double dt, const std::string& out) {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(std::max(1, level - 1));
    FiniteTypeSpec spec;
    spec.m = level;
    if (!constantsFile.empty()) {
        std::ifstream is(constantsFile);
        if (!is) throw std::runtime_error("cannot open " + constantsFile);
        json doc = json::parse(is);
        for (const auto& u : doc.at("U")) spec.U.push_back(gaussFromJson(u));
        for (const auto& v : doc.at("V")) spec.V.push_back(gaussFromJson(v));
    } else if (level == 2) {
        spec.U = {GaussQ(0)};
        spec.V = {GaussQ(1)};
    } else {
        throw std::runtime_error("--constants required for level != 2");
    }

    FailureList failures;
    LambdaMatrix X = buildKillingField(spec, hier);
    json doc{{"schema", "1"}, {"level", level}, {"lambdaDegree", X.degree}};

    GaussQ gamma(2), r(1), z3(GaussQ(1, 2));
    if (!stateFile.empty()) {
        std::ifstream is(stateFile);
        if (!is) throw std::runtime_error("cannot open " + stateFile);
        json stateDoc = json::parse(is);
        gamma = gaussFromJson(stateDoc.at("gamma"));
        r = gaussFromJson(stateDoc.at("r"));
        z3 = gaussFromJson(stateDoc.at("z3"));
    }
    // The admissible-state machinery is wired for the level-2 locus; for
    // higher levels the run reports the symbolic data only.
    if (level == 2) {
        FiniteTypeStateBuilder builder(spec, gamma, r);
        FiniteTypeState st = builder.fromZ3(z3);
        SpectralReport rep = spectralPolynomial(X, st, spec);
        if (!rep.rootsUnitCircleSymmetric)
            failures.add("finiteType.rootSymmetry", "root multiset not inversion-symmetric");

        json roots = json::array();
        for (const auto& root : rep.roots)
            roots.push_back({{"re", root.real()}, {"im", root.imag()}});
        json pCoeffs = json::array();
        for (const auto& c : rep.P) pCoeffs.push_back(toJson(c));
        doc["P"] = pCoeffs;
        doc["P0"] = toJson(rep.P0);
        doc["Ptop"] = toJson(rep.Ptop);
        doc["roots"] = roots;
        doc["rootPrecision"] = {{"newtonBits", 256}, {"pairingTolerance", rep.pairingTolerance}};
        doc["genusArithmetic"] = rep.genusArithmetic;
        doc["genusGeometric"] = rep.genusGeometric;
        doc["oddRootPairs"] = rep.oddRootPairs;
    } else if (integrateLength > 0 || !stateFile.empty()) {
        throw std::runtime_error("numeric state path implemented for level 2");
    }

    if (level == 2 && integrateLength > 0) {
        FiniteTypeStateBuilder builder(spec, gamma, r);
        FiniteTypeState st = builder.fromZ3(z3);
        Level2Flow flow(spec, gamma.re.get_d() * gamma.re.get_d(), 0.37);
        Level2Flow::State s0{r.re.get_d(),
                             {st.z.at(3).re.get_d(), st.z.at(3).im.get_d()},
                             {st.z.at(4).re.get_d(), st.z.at(4).im.get_d()}};
        PathReport path = flow.integrate(X, s0, integrateLength, dt, defaultLambdaSamples());
        doc["integration"] = {{"length", integrateLength},
                              {"dt", dt},
                              {"maxDriftP", path.maxDriftP},
                              {"maxConstraintResidual", path.maxConstraintResidual}};
        if (path.maxDriftP >= 1e-8)
            failures.add("finiteType.firstIntegral", "P(lambda) drift exceeds 1e-8");
        if (path.maxConstraintResidual >= 1e-8)
            failures.add("finiteType.constraint", "transversal relation drift exceeds 1e-8");
    }
    // Closed-system compatibility for the tractable levels.
    if (level - 1 >= 1 && level - 1 <= 4) {
        D2Report d2 = FiniteTypeClosedSystem(level - 1).d2Check();
        doc["d2Check"] = d2.ok;
        if (!d2.ok) failures.add("finiteType.d2", "closed structure equation incompatible");
    }
    writeArtifact(out, doc);
    return finish(failures, "finite-type level " + std::to_string(level));
}

int runSimulate(double gamma, double length, double dt, const std::string& out) {
    FailureList failures;
    auto sym = flatweb::flatWebCheck();
    if (!sym.ok()) failures.add("flatWeb.symbolic", "d^2 = 0 identities failed");
    flatweb::FlatWebFlow flow(gamma);
    auto rep = flow.integrate(1.0, 1.0, 0.0, length, dt);
    auto repHalf = flow.integrate(1.0, 1.0, 0.0, length, dt / 2);
    double ratio = repHalf.maxGaussResidual > 0
                       ? rep.maxGaussResidual / repHalf.maxGaussResidual
                       : 16.0;
    if (rep.maxGaussResidual >= 1e-8)
        failures.add("flatWeb.gaussResidual", "exceeds 1e-8");
    if (rep.maxDphiResidual >= 1e-8) failures.add("flatWeb.dphiResidual", "exceeds 1e-8");
    if (ratio < 12.0) failures.add("flatWeb.order", "step-halving gain below 12x");
    writeArtifact(out, json{{"schema", "1"},
                            {"symbolic",
                             {{"rhoSolve", sym.rhoSolve},
                              {"dphiSolve", sym.dphiSolve},
                              {"dCMatchesClosure", sym.dCMatchesClosure},
                              {"dphiCompatible", sym.dphiCompatible},
                              {"gaussCompatible", sym.gaussCompatible}}},
                            {"numeric",
                             {{"gamma", gamma},
                              {"length", length},
                              {"dt", dt},
                              {"maxGaussResidual", rep.maxGaussResidual},
                              {"maxDphiResidual", rep.maxDphiResidual},
                              {"halvingGain", ratio}}}});
    return finish(failures, "simulate flat-web");
}

int runDeform(int maxJ, const std::string& out) {
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(maxJ + 1);
    DotDerivation dot;
    FailureList failures;
    json rows = json::array();
    for (int j = 0; j <= maxJ; ++j) {
        OneForm p = dot.psi(j, hier);
        bool closed = dot.checkPsiClosed(j, hier);
        if (!closed) failures.add("deform.psiClosed", "psi_" + std::to_string(j));
        rows.push_back({{"j", j},
                        {"closed", closed},
                        {"prefactor", toJson(p.prefactor)},
                        {"fOmega", toJson(p.fOmega)},
                        {"fOmegaBar", toJson(p.fOmegaBar)}});
    }
    writeArtifact(out, json{{"schema", "1"}, {"psi", rows}});
    return finish(failures, "deform through j = " + std::to_string(maxJ));
}

int runPdeBridge(int depth, const std::string& out) {
    PdeBridge bridge;
    Derivation der;
    Hierarchy hier(der);
    hier.extendTo(std::min(4, depth));
    FailureList failures;
    json table = json::array();
    for (int j = 3; j <= depth + 2; ++j)
        table.push_back({{"z", j}, {"inU", toJson(bridge.zInU(j))}});
    json weights = json::array();
    for (int n = 1; n <= std::min(4, depth); ++n) {
        JetPolynomial img = bridge.dictionary(hier.level(n).A.shifted(n - 1, 0));
        bool ok = img.isHomogeneousOfWeight(2 * n - 1);
        if (!ok) failures.add("pdeBridge.weights", "a^" + std::to_string(2 * n + 1));
        weights.push_back({{"jacobiField", "a^" + std::to_string(2 * n + 1)},
                           {"weight", 2 * n - 1},
                           {"preserved", ok}});
    }
    for (int j = 1; j <= depth; ++j) {
        if (bridge.roundTrip(j) != JetPolynomial::w(j))
            failures.add("pdeBridge.roundTrip", "u_" + std::to_string(j));
    }
    writeArtifact(out, json{{"schema", "1"}, {"dictionary", table}, {"weights", weights}});
    return finish(failures, "pde-bridge depth " + std::to_string(depth));
}

void loadLadderCache(Derivation& der) {
    const char* path = std::getenv("CMC_LADDER_CACHE");
    if (!path) return;
    std::ifstream is(path);
    if (!is) return;
    try {
        json doc = json::parse(is);
        for (const auto& [key, val] : doc.at("that").items())
            der.installThat(std::stoi(key), jetFromJson(val));
    } catch (...) {
        // A stale or foreign cache is ignored, never trusted.
    }
}

void saveLadderCache(Derivation& der) {
    const char* path = std::getenv("CMC_LADDER_CACHE");
    if (!path) return;
    json table = json::object();
    for (const auto& [j, poly] : der.snapshotThat()) table[std::to_string(j)] = toJson(poly);
    std::ofstream os(path);
    if (os) os << json{{"schema", "1"}, {"that", table}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact toolkit for CMC conservation-law hierarchies"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = kDefaultSeed;
    app.add_option("--seed", seed, "global RNG seed (runs are reproducible)");

    auto* hierCmd = app.add_subcommand("hierarchy", "generate and verify the Killing ladder");
    int depth = 6;
    bool resume = false;
    std::string method = "both", hierOut;
    hierCmd->add_option("--depth", depth, "levels to compute");
    hierCmd->add_option("--method", method, "algebraic | both (cross-validated)");
    hierCmd->add_option("--out", hierOut, "output JSON path");
    hierCmd->add_flag("--resume", resume, "continue from an existing artifact");

    auto* verifyCmd = app.add_subcommand("verify", "re-verify a hierarchy artifact");
    std::string verifyFile, checks = "jacobi,weights,closedness";
    verifyCmd->add_option("file", verifyFile, "hierarchy JSON")->required();
    verifyCmd->add_option("--checks", checks, "comma list: jacobi,weights,closedness");

    auto* cvCmd = app.add_subcommand("cvlaws", "conservation-law closedness/exactness report");
    int cvMax = 4;
    std::string cvOut;
    cvCmd->add_option("--max-n", cvMax, "largest phi_n");
    cvCmd->add_option("--out", cvOut, "output JSON path");

    auto* umbCmd = app.add_subcommand("umbilic", "umbilic-local expansions and residues");
    int p = 2, order = 20, umbN = 1;
    std::string umbOut;
    umbCmd->add_option("--p", p, "umbilic degree");
    umbCmd->add_option("--order", order, "series truncation (total degree in w)");
    umbCmd->add_option("--n", umbN, "largest phi_n to expand");
    umbCmd->add_option("--out", umbOut, "output JSON path");

    auto* ftCmd = app.add_subcommand("finite-type", "polynomial Killing field and spectral data");
    int level = 2;
    std::string constantsFile, stateFile, ftOut;
    double integrateLength = 0, ftDt = 1e-3;
    ftCmd->add_option("--level", level, "finite-type level m");
    ftCmd->add_option("--constants", constantsFile, "JSON with U, V arrays");
    ftCmd->add_option("--state", stateFile, "JSON with gamma, r, z3");
    ftCmd->add_option("--integrate", integrateLength, "path length for the numeric run");
    ftCmd->add_option("--dt", ftDt, "step size");
    ftCmd->add_option("--out", ftOut, "output JSON path");

    auto* simCmd = app.add_subcommand("simulate", "flat 3-web compatibility and numeric flow");
    double simGamma = 1.0, simLength = 0.4, simDt = 1e-3;
    std::string simOut;
    simCmd->add_option("--gamma", simGamma, "structure constant");
    simCmd->add_option("--length", simLength, "path length");
    simCmd->add_option("--dt", simDt, "step size");
    simCmd->add_option("--out", simOut, "output JSON path");

    auto* defCmd = app.add_subcommand("deform", "Hopf-scaling deformation and psi_j laws");
    int maxJ = 3;
    std::string defOut;
    defCmd->add_option("--max-j", maxJ, "largest psi_j");
    defCmd->add_option("--out", defOut, "output JSON path");

    auto* pdeCmd = app.add_subcommand("pde-bridge", "sinh-Gordon jet dictionary");
    int pdeDepth = 6;
    std::string pdeOut;
    pdeCmd->add_option("--depth", pdeDepth, "dictionary depth");
    pdeCmd->add_option("--out", pdeOut, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    Derivation cacheProbe;
    loadLadderCache(cacheProbe);

    int rc = 1;
    try {
        if (*hierCmd) rc = runHierarchy(depth, method, hierOut, resume);
        if (*verifyCmd) rc = runVerify(verifyFile, checks);
        if (*cvCmd) rc = runCvlaws(cvMax, cvOut);
        if (*umbCmd) rc = runUmbilic(p, order, seed, umbN, umbOut);
        if (*ftCmd) rc = runFiniteType(level, constantsFile, stateFile, integrateLength, ftDt, ftOut);
        if (*simCmd) rc = runSimulate(simGamma, simLength, simDt, simOut);
        if (*defCmd) rc = runDeform(maxJ, defOut);
        if (*pdeCmd) rc = runPdeBridge(pdeDepth, pdeOut);
    } catch (const std::exception& e) {
        json doc{{"schema", "1"},
                 {"failures", json::array({{{"invariant", "run.exception"}, {"detail", e.what()}}})}};
        std::cerr << doc.dump(2) << "\n";
        return 2;
    }
    saveLadderCache(cacheProbe);
    return rc;
}
