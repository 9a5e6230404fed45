#pragma once

#include "oneform.hpp"

namespace cmckit {

// First-order deformation that scales the Hopf differential. The dot
// derivation acts on (polynomial, h-weight) pairs through
//   zdot_j = (j-2) z_j - eps_j,       rdot = -(2 w0 + 2) r,
//   (h2^{k/2})dot = -(k/2)(2 w0 + 2) h2^{k/2},
// with u housed as the weight-0 generator w0. Only a single dot is
// supported; no wdot_k rules exist.
class DotDerivation {
  public:
    explicit DotDerivation(DerivationRules rules = defaultRules()) : der_(rules) {}

    Derivation& derivation() { return der_; }

    // eps_j = h2^{-j/2} delta_j, built from the delta-recursion
    //   delta_2 = 0, delta_{j+1} = (delta_j)_xi + 2 j u_1 h_j,
    // which in normalized variables reads
    //   eps_{j+1} = dOmega(eps_j) + (j/2) z3 eps_j + 2 j w1 z_j   (z_2 = 1).
    const JetPolynomial& epsilon(int j) {
        if (j < 2) throw std::invalid_argument("epsilon: j must be >= 2");
        auto it = eps_.find(j);
        if (it != eps_.end()) return it->second;
        JetPolynomial val;
        if (j > 2) {
            int i = j - 1;
            const JetPolynomial& prev = epsilon(i);
            JetPolynomial zi = i == 2 ? JetPolynomial(1) : JetPolynomial::z(i);
            val = der_.dOmega(prev) + GaussQ(i, 2) * (JetPolynomial::z(3) * prev) +
                  GaussQ(2 * i) * (JetPolynomial::w(1) * zi);
        }
        return eps_.emplace(j, std::move(val)).first->second;
    }

    // Chain-rule dot on a z-pure polynomial with gamma/r Laurent factors,
    // shifted by the h2^{hWeight/2} scaling rule.
    JetPolynomial dot(const JetPolynomial& p, int hWeight = 0) {
        JetPolynomial out;
        JetPolynomial scale = GaussQ(2) * JetPolynomial::w(0) + JetPolynomial(2); // 2u + 2
        for (const auto& [m, c] : p.terms()) {
            if (m.rExp != 0)
                out += (GaussQ(-m.rExp) * c) * (JetPolynomial::monomial(m) * scale);
            for (const auto& [g, e] : m.exps) {
                if (g.kind != GenKind::Z)
                    throw std::invalid_argument("dot: only z-sector polynomials are dotted");
                JetPolynomial zdot =
                    GaussQ(g.index - 2) * JetPolynomial::z(g.index) - epsilon(g.index);
                out += (GaussQ(e) * c) * (JetPolynomial::monomial(m.dividedByGen(g)) * zdot);
            }
        }
        if (hWeight != 0) out += GaussQ(-hWeight, 2) * (scale * p);
        return out;
    }

    // Dotted lower-case frame triple of a ladder level.
    PaperFrameTriple dotHierarchy(const Hierarchy& hier, int n) {
        PaperFrameTriple t = hier.paperFrame(n);
        t.a.poly = dot(t.a.poly, t.a.hWeight);
        t.b.poly = dot(t.b.poly, t.b.hWeight);
        t.c.poly = dot(t.c.poly, t.c.hWeight);
        return t;
    }

    // psi_j = phidot_j - (2j-1) phi_j. With phi_j = -i (C omega + W omegabar),
    // W = r^{-1} B^{2j}, and omegadot = -omega:
    //   psi_j = -i [ (Cdot - 2j C) omega + (Wdot - 2j W) omegabar ].
    OneForm psi(int j, const Hierarchy& hier) {
        OneForm base = phi(j, hier);
        OneForm out;
        out.prefactor = base.prefactor;
        out.fOmega = dot(base.fOmega) - GaussQ(2 * j) * base.fOmega;
        out.fOmegaBar = dot(base.fOmegaBar) - GaussQ(2 * j) * base.fOmegaBar;
        return out;
    }

    // Exact closedness in the extended ring; the rewrite rule for
    // dOmegaBar(w_k) must be installed for this to hold.
    bool checkPsiClosed(int j, const Hierarchy& hier) {
        OneForm p = psi(j, hier);
        return isClosed(p, der_);
    }

  private:
    Derivation der_;
    std::map<int, JetPolynomial> eps_;
};

} // namespace cmckit
