#pragma once

#include <string>
#include <vector>

#include "solve.hpp"

namespace cmckit {

struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

// Level n of the formal Killing ladder in the normalized frame:
// A = A^{2n+1}, B = B^{2n+2}, C = C^{2n+2}.
struct HierarchyLevel {
    int n = 0;
    JetPolynomial A;
    JetPolynomial B;
    JetPolynomial C;
};

// Reconstruction of the lower-case frame coefficients a^{2n+1}, b^{2n+2},
// c^{2n+2}: value = prefactor * h2^{hWeight/2} * poly.
struct PaperFrameCoeff {
    GaussQ prefactor;
    int hWeight = 0; // exponent of h2^{1/2}
    JetPolynomial poly;

    friend bool operator==(const PaperFrameCoeff& x, const PaperFrameCoeff& y) {
        if (x.hWeight != y.hWeight) return false;
        return x.poly.scaled(x.prefactor) == y.poly.scaled(y.prefactor);
    }
};

struct PaperFrameTriple {
    PaperFrameCoeff a; // = 2 A^{2n+1}
    PaperFrameCoeff b; // = -i h2^{-1/2} B^{2n+2}
    PaperFrameCoeff c; // = -i h2^{1/2}  C^{2n+2}
};

struct LevelReport {
    int n = 0;
    bool ok = true;
    std::vector<std::string> failures;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
};

class Hierarchy {
  public:
    explicit Hierarchy(Derivation& der) : der_(der) {
        HierarchyLevel l0;
        l0.n = 0;
        l0.A = JetPolynomial();            // A^1 = 0
        l0.B = JetPolynomial::gamma(1);    // B^2 = gamma
        l0.C = JetPolynomial(GaussQ(-1));  // C^2 = -1
        levels_.push_back(std::move(l0));
        nextA_ = GaussQ(1, 2) * JetPolynomial::z(3); // A^3 = z3/2
    }

    const std::vector<HierarchyLevel>& levels() const { return levels_; }
    const HierarchyLevel& level(int n) const { return levels_.at(n); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    const JetPolynomial& pendingA() const { return nextA_; }

    void extendTo(int n) {
        while (depth() < n) step();
    }

    // Resume from persisted levels; the pending Jacobi field is recovered
    // through the C-route identity A^{2n+3} = -dOmega(C^{2n+2}) - A^3 C^{2n+2}.
    void resumeFrom(std::vector<HierarchyLevel> levels) {
        if (levels.empty() || levels.front().n != 0)
            throw std::invalid_argument("resume: levels must start at n = 0");
        levels_ = std::move(levels);
        const HierarchyLevel& top = levels_.back();
        if (top.n == 0) {
            nextA_ = GaussQ(1, 2) * JetPolynomial::z(3);
        } else {
            JetPolynomial a3 = levels_.at(1).A;
            nextA_ = -der_.dOmega(top.C) - a3 * top.C;
        }
    }

    // One step of the differential-algebraic recursion: with levels 0..n and
    // A^{2n+3} in hand, produce level n+1 via
    //   m^_N = s^_N + parity correction (N = n+1),
    //   B^{2N+2} = dOmega(A^{2N+1}) + m^_N/4,
    //   C^{2N+2} = (dOmega(A^{2N+1}) - m^_N/4)/gamma,
    //   A^{2N+3} = (A^3 B^{2N+2} - dOmega(B^{2N+2}))/gamma.
    void step() {
        const int N = depth() + 1;
        JetPolynomial mhat = mHat(N);
        JetPolynomial dA = der_.dOmega(nextA_);
        HierarchyLevel lvl;
        lvl.n = N;
        lvl.A = nextA_;
        lvl.B = dA + GaussQ(1, 4) * mhat;
        lvl.C = (dA - GaussQ(1, 4) * mhat).shifted(-1, 0);
        levels_.push_back(lvl);
        nextA_ = (A(1) * lvl.B - der_.dOmega(lvl.B)).shifted(-1, 0);
    }

    // The gamma-free Jacobi-field recursion (independent oracle):
    //   C = antiderivativeOmegaBar(g^2 r^{-1} A, wt+1),
    //   A' = dOmega(dOmega(A)) - (1/2) z3 (dOmega(A) + C).
    JetPolynomial stepIntegration(const JetPolynomial& A, int weight) const {
        JetSolver solver(der_);
        JetPolynomial target = JetPolynomial::gamma(2).shifted(0, -1) * A;
        auto anti = solver.antiderivativeOmegaBar(target, weight + 1);
        if (anti.obstructed())
            throw InvariantViolation("stepIntegration: antiderivative obstructed on a Jacobi field");
        JetPolynomial dA = der_.dOmega(A);
        return der_.dOmega(dA) -
               GaussQ(1, 2) * (JetPolynomial::z(3) * (dA + *anti.witness));
    }

    PaperFrameTriple paperFrame(int n) const {
        const HierarchyLevel& l = level(n);
        PaperFrameTriple t;
        t.a = {GaussQ(2), 0, l.A};
        t.b = {-GaussQ::i(), -1, l.B};
        t.c = {-GaussQ::i(), +1, l.C};
        return t;
    }

    LevelReport verifyLevel(int n) const {
        LevelReport rep;
        rep.n = n;
        const HierarchyLevel& l = level(n);
        Derivation der(der_.rules());

        rep.require(der.jacobiE(GaussQ(2) * l.A).isZero(), "jacobiE(a^{2n+1}) != 0");
        if (n >= 1) {
            rep.require(l.A.isHomogeneousOfWeight(2 * n - 1), "A weight != 2n-1");
            rep.require(l.B.isHomogeneousOfWeight(2 * n), "B weight != 2n");
            rep.require(l.C.isHomogeneousOfWeight(2 * n), "C weight != 2n");
            rep.require(leadingMatches(l.A, 2 * n + 1, leadingA(n)), "A leading term mismatch");
            rep.require(leadingMatches(l.B, 2 * n + 2, leadingB(n)), "B leading term mismatch");
            rep.require(leadingMatches(l.C, 2 * n + 2, leadingC(n)), "C leading term mismatch");
            rep.require(rationalBrackets(l, n), "bracket coefficients not rational");
        }
        // Structure-equation closure.
        rep.require(der.dOmegaBar(l.B) == -(JetPolynomial::r(1) * l.A),
                    "dOmegaBar(B^{2n+2}) != -r A^{2n+1}");
        rep.require(der.dOmegaBar(l.C) == -(JetPolynomial::gamma(1).shifted(0, -1) * l.A),
                    "dOmegaBar(C^{2n+2}) != -g r^{-1} A^{2n+1}");
        // The C-route to the next Jacobi field must agree with the B-route.
        const JetPolynomial& nextA = (n == depth()) ? nextA_ : level(n + 1).A;
        JetPolynomial viaC = -der.dOmega(l.C) - A(1) * l.C;
        rep.require(viaC == nextA, "C-route to A^{2n+3} disagrees");
        return rep;
    }

    // Normal-form leading coefficients: A: (-1)^{n-1}/(2 g^{n-1}),
    // B: (-1)^{n+1}/(2 g^{n-1}), C: (-1)^{n+1}/(2 g^{n}).
    static GaussQ signHalf(int par) { return (par % 2 == 0) ? GaussQ(1, 2) : GaussQ(-1, 2); }
    static std::pair<GaussQ, int> leadingA(int n) { return {signHalf(n - 1), -(n - 1)}; }
    static std::pair<GaussQ, int> leadingB(int n) { return {signHalf(n + 1), -(n - 1)}; }
    static std::pair<GaussQ, int> leadingC(int n) { return {signHalf(n + 1), -n}; }

  private:
    Derivation& der_;
    std::vector<HierarchyLevel> levels_;
    JetPolynomial nextA_; // A^{2(depth)+3}

    JetPolynomial A(int n) const { return n <= depth() ? level(n).A : nextA_; }

    // a^_{ij} = 4 A^{2i+1} A^{2j+3} + 2 (B^{2i+2} C^{2j+2} + B^{2j+2} C^{2i+2})
    JetPolynomial aHat(int i, int j) const {
        return GaussQ(4) * (A(i) * A(j + 1)) +
               GaussQ(2) * (level(i).B * level(j).C + level(j).B * level(i).C);
    }

    JetPolynomial mHat(int N) const {
        JetPolynomial s;
        for (int i = 1; 2 * i <= N; ++i) s += aHat(i, N - i);
        if (N % 2 == 0) {
            s += GaussQ(1, 2) * (-aHat(N / 2, N / 2) + GaussQ(4) * (A(N / 2) * A(N / 2 + 1)));
        } else {
            s += GaussQ(2) * (A((N + 1) / 2) * A((N + 1) / 2));
        }
        return s;
    }

    static bool leadingMatches(const JetPolynomial& p, int topIndex,
                               std::pair<GaussQ, int> expected) {
        Monomial m = Monomial::gen(zGen(topIndex));
        m.gammaExp = expected.second;
        return p.coefficient(m) == expected.first;
    }

    // All coefficients of g^{n-1} A, etc., must be plain rationals.
    static bool rationalBrackets(const HierarchyLevel& l, int n) {
        auto rationalAt = [](const JetPolynomial& p, int gShift) {
            for (const auto& [m, c] : p.terms()) {
                if (m.gammaExp + gShift != 0 || m.rExp != 0) return false;
                if (!c.isReal()) return false;
            }
            return true;
        };
        return rationalAt(l.A, n - 1) && rationalAt(l.B, n - 1) && rationalAt(l.C, n);
    }
};

} // namespace cmckit
