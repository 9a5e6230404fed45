#pragma once

#include "derivation.hpp"

namespace cmckit {

// Dictionary between the CMC jet variables z_j and the elliptic
// sinh-Gordon jet variables u_k (housed as the w-generators, weight(u_k) = k):
//   p_{j+2} = -4 u_j with p_3 = z3 and p_{j+1} = dOmega(p_j),
// inverted as the triangular substitution
//   z_3 = -4 u_1,   z_j = -4 u_{j-2} - (p_j - z_j)[z -> Z]  for j >= 4.
class PdeBridge {
  public:
    explicit PdeBridge(DerivationRules rules = defaultRules()) : der_(rules) {}

    // p_j as a z-pure polynomial (j >= 3).
    const JetPolynomial& pPoly(int j) {
        if (j < 3) throw std::invalid_argument("pPoly: j must be >= 3");
        auto it = p_.find(j);
        if (it != p_.end()) return it->second;
        JetPolynomial val = j == 3 ? JetPolynomial::z(3) : der_.dOmega(pPoly(j - 1));
        return p_.emplace(j, std::move(val)).first->second;
    }

    // z_j expressed in the u-variables.
    const JetPolynomial& zInU(int j) {
        if (j < 3) throw std::invalid_argument("zInU: j must be >= 3");
        auto it = zu_.find(j);
        if (it != zu_.end()) return it->second;
        JetPolynomial val = GaussQ(-4) * JetPolynomial::w(j - 2);
        if (j > 3) {
            JetPolynomial lower = pPoly(j) - JetPolynomial::z(j);
            val -= dictionary(lower);
        }
        return zu_.emplace(j, std::move(val)).first->second;
    }

    // Substitute z_j -> Z_j(u) throughout a z-pure polynomial; a ring
    // homomorphism by construction.
    JetPolynomial dictionary(const JetPolynomial& poly) {
        JetPolynomial out;
        for (const auto& [m, c] : poly.terms()) {
            JetPolynomial term = JetPolynomial::monomial(Monomial(m.gammaExp, m.rExp), c);
            for (const auto& [g, e] : m.exps) {
                if (g.kind != GenKind::Z)
                    throw std::invalid_argument("dictionary: input must be z-pure");
                term = term * zInU(g.index).pow(e);
            }
            out += term;
        }
        return out;
    }

    // The inverse leg: u_j -> -p_{j+2}(z)/4.
    JetPolynomial uInZ(int j) {
        if (j < 1) throw std::invalid_argument("uInZ: j must be >= 1");
        return GaussQ(-1, 4) * pPoly(j + 2);
    }

    JetPolynomial roundTrip(int j) { return dictionary(uInZ(j)); }

    // Total z-derivative on u-polynomials: u_k -> u_{k+1}, Leibniz.
    static JetPolynomial totalDz(const JetPolynomial& q) {
        JetPolynomial out;
        for (const auto& [m, c] : q.terms()) {
            for (const auto& [g, e] : m.exps) {
                if (g.kind != GenKind::W)
                    throw std::invalid_argument("totalDz: input must be a u-polynomial");
                out.addTerm(m.dividedByGen(g).times(Monomial::gen(wGen(g.index + 1))),
                            GaussQ(e) * c);
            }
        }
        return out;
    }

    // Source term f(u) = 1/4 (g^2 e^{2u} - e^{-2u}) and its total
    // derivatives S_j = d_z S_{j-1}; e^{+-2u} stay opaque unit symbols with
    // d_z E_{+-} = +-2 u_1 E_{+-}.
    struct SourceTerm {
        JetPolynomial plus;  // coefficient of E_+
        JetPolynomial minus; // coefficient of E_-

        friend bool operator==(const SourceTerm& a, const SourceTerm& b) {
            return a.plus == b.plus && a.minus == b.minus;
        }
    };

    static SourceTerm sourceTerm() {
        SourceTerm s;
        s.plus = GaussQ(1, 4) * JetPolynomial::gamma(2);
        s.minus = JetPolynomial(GaussQ(-1, 4));
        return s;
    }

    static SourceTerm totalDz(const SourceTerm& s) {
        JetPolynomial twoU1 = GaussQ(2) * JetPolynomial::w(1);
        SourceTerm out;
        out.plus = totalDz(s.plus) + twoU1 * s.plus;
        out.minus = totalDz(s.minus) - twoU1 * s.minus;
        return out;
    }

    static SourceTerm sourceTermDerivative(int j) {
        SourceTerm s = sourceTerm();
        for (int k = 1; k < j; ++k) s = totalDz(s);
        return s;
    }

  private:
    Derivation der_;
    std::map<int, JetPolynomial> p_;
    std::map<int, JetPolynomial> zu_;
};

} // namespace cmckit
