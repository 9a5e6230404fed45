#pragma once

#include <cmath>

#include "finitetype.hpp"
#include "sympoly.hpp"

namespace cmckit {

// Flat structure 3-web: the nonlinear finite-type class Im(z4/z3^2) = 0.
// In the all-real-phase gauge h_2 = A e^{i phi}, h_3 = B e^{i phi},
// h_4 = C e^{i phi} the structure equation un-couples:
//   dA = B w1, dB = (C - A^3 + g^2 A) w1, dC = G_C w1,
//   dphi = g_phi w2, rho = g w2,
// with g = (CA - B^2 + A^4 - g^2 A^2)/(BA) and
// g_phi = (-2CA + 3B^2 - 2A^4 + 2 g^2 A^2)/(BA).
namespace flatweb {

inline SymPoly S(const std::string& s, int e = 1) { return SymPoly::sym(s, e); }

inline SymPoly gConn() { // rho-coefficient
    return (S("C") * S("A") - S("B", 2) + S("A", 4) - S("g", 2) * S("A", 2)) *
           S("A", -1) * S("B", -1);
}
inline SymPoly gPhi() { // dphi-coefficient
    return (S("B", 2).scaled(GaussQ(3)) - (S("C") * S("A")).scaled(GaussQ(2)) -
            S("A", 4).scaled(GaussQ(2)) + (S("g", 2) * S("A", 2)).scaled(GaussQ(2))) *
           S("A", -1) * S("B", -1);
}
// dC-coefficient, as solved from the order-5 closure of the web relation.
inline SymPoly gC() {
    return S("C", 2).scaled(GaussQ(2)) * S("B", -1) +
           (S("A", 4).scaled(GaussQ(2)) - (S("g", 2) * S("A", 2)).scaled(GaussQ(2)) -
            S("B", 2)) *
               S("C") * S("A", -1) * S("B", -1) +
           (S("g", 2) * S("B")).scaled(GaussQ(5)) - (S("A", 2) * S("B")).scaled(GaussQ(7));
}

// d/ds along the omega^1-direction.
inline SymPoly flowDerive(const SymPoly& p) {
    return p.derive([](const std::string& s) -> SymPoly {
        if (s == "A") return S("B");
        if (s == "B") return S("C") - S("A", 3) + S("g", 2) * S("A");
        if (s == "C") return gC();
        return {};
    });
}

struct FlatWebSymbolicReport {
    bool rhoSolve = false;         // rho-coefficient from the h2, h3 equations
    bool dphiSolve = false;        // g_phi = B/A - 2 g
    bool dCMatchesClosure = false; // printed dC coefficient = C (g_phi + 4g) + 5 g^2 B - 7 A^2 B
    bool dphiCompatible = false;   // d^2 phi = 0:  g_phi' = g g_phi
    bool gaussCompatible = false;  // d rho = (g^2 - A^2) w1 ^ w2:  g' - g^2 = g^2 - A^2
    bool ok() const {
        return rhoSolve && dphiSolve && dCMatchesClosure && dphiCompatible && gaussCompatible;
    }
};

// Exact polynomial identities behind the order-5 closure and d^2 = 0 for
// the un-coupled system.
inline FlatWebSymbolicReport flatWebCheck() {
    FlatWebSymbolicReport rep;
    SymPoly g = gConn(), gphi = gPhi();
    // Solving the imaginary parts of the h2, h3 structure equations:
    //   A (dphi + 2 rho) = B w2,  B (dphi + 3 rho) = (C - g^2 A + A^3) w2.
    SymPoly rhoViaSolve =
        (S("C") - S("g", 2) * S("A") + S("A", 3)) * S("B", -1) - S("B") * S("A", -1);
    rep.rhoSolve = (g - rhoViaSolve).isZero();
    rep.dphiSolve = (gphi - (S("B") * S("A", -1) - g.scaled(GaussQ(2)))).isZero();
    // The h4 equation with h5 solved away and T4 = (5/2) g^2 h3 - (7/2) |h2|^2 h3.
    SymPoly viaClosure = S("C") * (gphi + g.scaled(GaussQ(4))) +
                         (S("g", 2) * S("B")).scaled(GaussQ(5)) -
                         (S("A", 2) * S("B")).scaled(GaussQ(7));
    rep.dCMatchesClosure = (gC() - viaClosure).isZero();
    rep.dphiCompatible = (flowDerive(gphi) - g * gphi).isZero();
    rep.gaussCompatible = (flowDerive(g) - g * g - S("g", 2) + S("A", 2)).isZero();
    return rep;
}

// The web relation in jet coordinates: Im(z4/z3^2) = 0 is equivalent to
// zbar3^2 z4 = z3^2 zbar4 (clearing h-powers by r^6).
inline bool webRelationJetForm() {
    JetPolynomial lhs = JetPolynomial::zb(3).pow(2) * JetPolynomial::z(4);
    JetPolynomial rhs = JetPolynomial::z(3).pow(2) * JetPolynomial::zb(4);
    JetPolynomial diff = lhs - rhs;
    return diff == -(diff.conj());
}

struct FlatWebPathReport {
    double maxGaussResidual = 0;
    double maxDphiResidual = 0; // co-integrated g_phi against its closed form
    int steps = 0;
};

// Numeric integration of the un-coupled A, B, C flow with two co-integrated
// identity monitors: ghat' = ghat^2 + (g^2 - A^2) tracks the Gauss equation,
// gphihat' = g gphihat tracks d^2 phi = 0. Residual = |co-integrated value -
// closed-form value along the flow|; 4th-order stepping.
class FlatWebFlow {
  public:
    explicit FlatWebFlow(double gamma) : gamma_(gamma) {}

    struct State {
        double A, B, C;
        double ghat, gphihat;
    };

    static double gOf(double gamma, const State& s) {
        return (s.C * s.A - s.B * s.B + std::pow(s.A, 4) - gamma * gamma * s.A * s.A) /
               (s.B * s.A);
    }
    static double gPhiOf(double gamma, const State& s) {
        return (-2 * s.C * s.A + 3 * s.B * s.B - 2 * std::pow(s.A, 4) +
                2 * gamma * gamma * s.A * s.A) /
               (s.B * s.A);
    }

    State derivative(const State& s) const {
        if (std::abs(s.A) < 1e-12 || std::abs(s.B) < 1e-12)
            throw StepFailure("flat-web flow needs A != 0 and B != 0");
        double g2 = gamma_ * gamma_;
        State d;
        d.A = s.B;
        d.B = s.C - std::pow(s.A, 3) + g2 * s.A;
        d.C = 2 * s.C * s.C / s.B + (-s.B * s.B + 2 * std::pow(s.A, 4) - 2 * g2 * s.A * s.A) * s.C /
                  (s.B * s.A) +
              5 * g2 * s.B - 7 * s.B * s.A * s.A;
        d.ghat = s.ghat * s.ghat + (g2 - s.A * s.A);
        d.gphihat = gOf(gamma_, s) * s.gphihat;
        return d;
    }

    State rk4(const State& s, double h) const {
        auto add = [](const State& a, const State& b, double f) {
            return State{a.A + f * b.A, a.B + f * b.B, a.C + f * b.C, a.ghat + f * b.ghat,
                         a.gphihat + f * b.gphihat};
        };
        State k1 = derivative(s);
        State k2 = derivative(add(s, k1, h / 2));
        State k3 = derivative(add(s, k2, h / 2));
        State k4 = derivative(add(s, k3, h));
        State out = s;
        out.A += h / 6 * (k1.A + 2 * k2.A + 2 * k3.A + k4.A);
        out.B += h / 6 * (k1.B + 2 * k2.B + 2 * k3.B + k4.B);
        out.C += h / 6 * (k1.C + 2 * k2.C + 2 * k3.C + k4.C);
        out.ghat += h / 6 * (k1.ghat + 2 * k2.ghat + 2 * k3.ghat + k4.ghat);
        out.gphihat += h / 6 * (k1.gphihat + 2 * k2.gphihat + 2 * k3.gphihat + k4.gphihat);
        return out;
    }

    FlatWebPathReport integrate(double A0, double B0, double C0, double length, double h) const {
        State s{A0, B0, C0, gOf(gamma_, {A0, B0, C0, 0, 0}), gPhiOf(gamma_, {A0, B0, C0, 0, 0})};
        FlatWebPathReport rep;
        int n = static_cast<int>(std::llround(length / h));
        for (int i = 0; i < n; ++i) {
            s = rk4(s, h);
            ++rep.steps;
            rep.maxGaussResidual = std::max(rep.maxGaussResidual, std::abs(s.ghat - gOf(gamma_, s)));
            rep.maxDphiResidual =
                std::max(rep.maxDphiResidual, std::abs(s.gphihat - gPhiOf(gamma_, s)));
        }
        return rep;
    }

  private:
    double gamma_;
};

} // namespace flatweb
} // namespace cmckit
