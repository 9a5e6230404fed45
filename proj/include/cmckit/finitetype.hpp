#pragma once

#include <complex>
#include <functional>

#include "hierarchy.hpp"

namespace cmckit {

struct ConstantsNotAdapted : std::runtime_error {
    explicit ConstantsNotAdapted(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateState : std::runtime_error {
    explicit DegenerateState(const std::string& what) : std::runtime_error(what) {}
};
struct StepFailure : std::runtime_error {
    explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

// Which adapted normalization the constants satisfy: |V_{m-1}|^2 = gamma^2
// (the closed-system sections) or |V_{m-1}|^2 = 1 (the polynomial Killing
// field sections).
enum class FtNormalization { SectionEleven, SectionFourteen };

struct FiniteTypeSpec {
    int m = 2;                   // level of the linear finite-type relation
    std::vector<GaussQ> U;       // U_1..U_{m-1}
    std::vector<GaussQ> V;       // V_1..V_{m-1}
    FtNormalization normalization = FtNormalization::SectionFourteen;
    mpq_class gammaSq = 1;       // numeric gamma^2, for the SectionEleven branch

    // Adapted conditions. The relation V_j = -V_{m-1} conj(U_{j+1}) is only
    // enforced on 1 <= j <= m-2; the compatibility of the endpoint is
    // certified by the closed-system d^2 check instead.
    void validate(bool exactSymbolicMode = true) const {
        if (m < 1) throw ConstantsNotAdapted("level m must be >= 1");
        if (static_cast<int>(U.size()) != m - 1 || static_cast<int>(V.size()) != m - 1)
            throw ConstantsNotAdapted("need U_1..U_{m-1} and V_1..V_{m-1}");
        if (m == 1) return;
        const GaussQ& vTop = V[m - 2];
        mpq_class target =
            normalization == FtNormalization::SectionFourteen ? mpq_class(1) : gammaSq;
        if (vTop.normSq() != target)
            throw ConstantsNotAdapted("|V_{m-1}|^2 does not match the normalization");
        if (exactSymbolicMode && normalization == FtNormalization::SectionFourteen &&
            !vTop.isUnit())
            throw ConstantsNotAdapted("exact mode needs V_{m-1} in {1,-1,i,-i}");
        for (int j = 1; j <= m - 2; ++j) {
            if (V[j - 1] != -(vTop * U[j].conj()))
                throw ConstantsNotAdapted("V_j != -V_{m-1} conj(U_{j+1}) at j=" +
                                          std::to_string(j));
        }
    }
};

// Polynomial in the spectral parameter with jet-polynomial coefficients.
using LambdaPoly = std::vector<JetPolynomial>;

inline LambdaPoly lambdaShift(const LambdaPoly& p, int k) {
    LambdaPoly out(p.size() + k);
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i].isZero()) continue;
        int d = static_cast<int>(i) + k;
        if (d < 0) throw std::logic_error("lambdaShift: negative power produced");
        out[d] += p[i];
    }
    return out;
}
inline LambdaPoly lambdaAdd(const LambdaPoly& a, const LambdaPoly& b) {
    LambdaPoly out(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}
inline LambdaPoly lambdaMul(const LambdaPoly& a, const LambdaPoly& b) {
    if (a.empty() || b.empty()) return {};
    LambdaPoly out(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].isZero()) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            if (b[j].isZero()) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}
inline LambdaPoly lambdaScale(const LambdaPoly& a, const JetPolynomial& f) {
    LambdaPoly out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * f;
    return out;
}

// sl(2)-valued polynomial Killing field in the scaled frame
//   [ -i a(l)      2 c(l) ]
//   [ 2 l b(l)     i a(l) ],
// trace-free by construction, with det = l P(l) and
// P(l) = l^{-1} a(l)^2 - 4 b(l) c(l) of degree 4m-4.
struct LambdaMatrix {
    int m = 0;
    int degree = 0; // 2m-1 after the global lambda^{1/2}
    LambdaPoly a, b, c;

    std::array<std::array<LambdaPoly, 2>, 2> entries() const {
        JetPolynomial i = JetPolynomial(GaussQ::i());
        return {{{lambdaScale(a, -i), lambdaScale(c, JetPolynomial(2))},
                 {lambdaShift(lambdaScale(b, JetPolynomial(2)), 1), lambdaScale(a, i)}}};
    }

    LambdaPoly spectralPoly() const {
        LambdaPoly p = lambdaShift(lambdaMul(a, a), -1);
        LambdaPoly bc = lambdaMul(b, c);
        for (auto& q : bc) q = GaussQ(-4) * q;
        p = lambdaAdd(p, bc);
        p.resize(4 * m - 3);
        return p;
    }
};

// Assemble the polynomial Killing field from the ladder and the adapted
// constants:
//   p_j(l) = s_j(l) = -1 + sum_{k>j} U_k l^{m-k},   p_0 includes U_1..U_{m-1},
//   q_j(l) = t_j(l) = -sum_{k>=j} V_k l^{m+k-1},
//   a(l) = sum_j [ s_j l^j (2A^{2j+1}) + t_j l^{1-j} (2 conj(A^{2j+1})) ],
//   b(l) = sum_j [ p_j l^j (-i B^{2j+2}) - q_j l^{1-j} (i r conj(C^{2j})) ] - i g p_0,
//   c(l) = sum_j [ p_j l^j (-i C^{2j+2}) - q_j l^{1-j} (i r^{-1} conj(B^{2j})) ] + i p_0.
inline LambdaMatrix buildKillingField(const FiniteTypeSpec& spec, const Hierarchy& hier) {
    spec.validate();
    if (spec.m < 2)
        throw ConstantsNotAdapted(
            "level 1 degenerates to a^3 = 0 (generalized cylinder); no Killing field ansatz");
    const int m = spec.m;
    if (hier.depth() < m - 1)
        throw std::invalid_argument("hierarchy not computed through level m-1");

    auto U = [&spec](int k) { return spec.U[k - 1]; };
    auto V = [&spec](int k) { return spec.V[k - 1]; };

    // s_j = p_j as lambda-polynomials (constant jet coefficients).
    auto pPoly = [&](int j) {
        LambdaPoly s(std::max(1, m - j));
        s[0] = JetPolynomial(GaussQ(-1));
        int lo = j == 0 ? 1 : j + 1;
        for (int k = lo; k <= m - 1; ++k) s[m - k] += JetPolynomial(U(k));
        return s;
    };
    auto qPoly = [&](int j) {
        LambdaPoly q(2 * m - 1);
        for (int k = j; k <= m - 1; ++k) q[m + k - 1] -= JetPolynomial(V(k));
        return q;
    };

    const GaussQ I = GaussQ::i();
    LambdaMatrix X;
    X.m = m;
    X.degree = 2 * m - 1;
    X.a = LambdaPoly(2 * m - 1);
    X.b = LambdaPoly(2 * m - 1);
    X.c = LambdaPoly(2 * m - 1);

    for (int j = 1; j <= m - 1; ++j) {
        const HierarchyLevel& lj = hier.level(j);         // A^{2j+1}, B^{2j+2}, C^{2j+2}
        const HierarchyLevel& lj1 = hier.level(j - 1);    // B^{2j}, C^{2j}
        X.a = lambdaAdd(X.a, lambdaShift(lambdaScale(pPoly(j), GaussQ(2) * lj.A), j));
        X.a = lambdaAdd(X.a, lambdaShift(lambdaScale(qPoly(j), GaussQ(2) * lj.A.conj()), 1 - j));

        X.b = lambdaAdd(X.b, lambdaShift(lambdaScale(pPoly(j), (-I) * lj.B), j));
        JetPolynomial rCbar = (-I) * (JetPolynomial::r(1) * lj1.C.conj());
        X.b = lambdaAdd(X.b, lambdaShift(lambdaScale(qPoly(j), rCbar), 1 - j));

        X.c = lambdaAdd(X.c, lambdaShift(lambdaScale(pPoly(j), (-I) * lj.C), j));
        JetPolynomial rInvBbar = (-I) * (lj1.B.conj().shifted(0, -1));
        X.c = lambdaAdd(X.c, lambdaShift(lambdaScale(qPoly(j), rInvBbar), 1 - j));
    }
    LambdaPoly p0 = pPoly(0);
    X.b = lambdaAdd(X.b, lambdaScale(p0, (-I) * JetPolynomial::gamma(1)));
    X.c = lambdaAdd(X.c, lambdaScale(p0, JetPolynomial(I)));

    X.a.resize(2 * m - 1);
    X.b.resize(2 * m - 1);
    X.c.resize(2 * m - 1);
    if (!X.a[0].isZero()) throw std::logic_error("a(lambda) must be divisible by lambda");
    return X;
}

// A point of the prolonged finite-type locus: exact values for r, gamma and
// the z-generators (conjugates implied by reality).
struct FiniteTypeState {
    GaussQ gamma;
    GaussQ r;
    std::map<int, GaussQ> z; // z_j values; zbar_j = conj(z_j)

    GaussQ genValue(const Generator& g) const {
        switch (g.kind) {
            case GenKind::Z: return z.at(g.index);
            case GenKind::ZBar: return z.at(g.index).conj();
            default: throw std::invalid_argument("state covers only z-sector generators");
        }
    }

    GaussQ evaluate(const JetPolynomial& p) const {
        GaussQ total;
        for (const auto& [mono, coef] : p.terms()) {
            GaussQ term = coef;
            auto mulPow = [&term](const GaussQ& base, int e) {
                GaussQ v(1);
                for (int i = 0; i < std::abs(e); ++i) v *= base;
                term *= e < 0 ? v.inverse() : v;
            };
            if (mono.gammaExp != 0) mulPow(gamma, mono.gammaExp);
            if (mono.rExp != 0) mulPow(r, mono.rExp);
            for (const auto& [g, e] : mono.exps) mulPow(genValue(g), e);
            total += term;
        }
        return total;
    }
};

// m = 2 admissible states. The locus is cut by
//   (1/2g)(z4 - 7/4 z3^2) = -U1 + (V1/2r)(conj(z4) - 5/4 conj(z3)^2) - g V1 conj(U1)/r
// (the transversal relation from the second antiholomorphic derivative of
// the defining equation) together with the eliminations of z_5, z_6, ...
// obtained by differentiating a^5 = U1 a^3 + V1 conj(a^3) along omega.
class FiniteTypeStateBuilder {
  public:
    FiniteTypeStateBuilder(const FiniteTypeSpec& spec, GaussQ gamma, GaussQ r)
        : spec_(spec), gamma_(std::move(gamma)), r_(std::move(r)) {
        if (spec.m != 2)
            throw std::invalid_argument("state builder implements the level-2 locus");
        spec.validate();
        GaussQ alphaNorm = (gamma_ * gamma_) / (r_ * r_);
        if (alphaNorm == GaussQ(1)) throw DegenerateState("r^2 = gamma^2 is excluded");
        if (r_.isZero()) throw DegenerateState("r = 0 is excluded");
    }

    FiniteTypeState fromZ3(const GaussQ& z3, int maxIndex = 8) const {
        const GaussQ& U1 = spec_.U[0];
        const GaussQ& V1 = spec_.V[0];
        GaussQ alpha = gamma_ * V1 / r_;
        GaussQ beta = GaussQ(7, 4) * z3 * z3 - GaussQ(2) * gamma_ * U1 -
                      GaussQ(5, 4) * alpha * z3.conj() * z3.conj() -
                      GaussQ(2) * gamma_ * gamma_ * V1 * U1.conj() / r_;
        GaussQ z4 = (beta + alpha * beta.conj()) / (GaussQ(1) - alpha * alpha.conj());

        FiniteTypeState st;
        st.gamma = gamma_;
        st.r = r_;
        st.z[3] = z3;
        st.z[4] = z4;
        for (int j = 5; j <= maxIndex; ++j) st.z[j] = st.evaluate(elimination(j));
        return st;
    }

    // Value polynomial for z_j, j >= 5, in the free coordinates z3, z4 and
    // conjugates: seeded by the level-2 relation
    //   z5 = 5 z3 z4 - 35/8 z3^3 - g (U1 z3 + V1 zbar3),
    // prolonged by z_{j+1} = dOmega(z_j) + (j/2) z3 z_j with the z5
    // occurrences re-eliminated.
    const JetPolynomial& elimination(int j) const {
        if (j < 5) throw std::invalid_argument("elimination defined for j >= 5");
        auto it = elim_.find(j);
        if (it != elim_.end()) return it->second;
        JetPolynomial val;
        if (j == 5) {
            val = GaussQ(5) * (JetPolynomial::z(3) * JetPolynomial::z(4)) -
                  GaussQ(35, 8) * JetPolynomial::z(3).pow(3) -
                  JetPolynomial::gamma(1) *
                      (spec_.U[0] * JetPolynomial::z(3) + spec_.V[0] * JetPolynomial::zb(3));
        } else {
            Derivation der;
            const JetPolynomial& prev = elimination(j - 1);
            JetPolynomial next =
                der.dOmega(prev) + GaussQ(j - 1, 2) * (JetPolynomial::z(3) * prev);
            val = substituteGen(next, zGen(5), elimination(5));
        }
        return elim_.emplace(j, std::move(val)).first->second;
    }

    // Replace one generator by a value polynomial.
    static JetPolynomial substituteGen(const JetPolynomial& p, const Generator& gen,
                                       const JetPolynomial& value) {
        JetPolynomial out;
        for (const auto& [m, c] : p.terms()) {
            Monomial rest(m.gammaExp, m.rExp);
            int power = 0;
            for (const auto& [g, e] : m.exps) {
                if (g == gen) {
                    power = e;
                } else {
                    rest = rest.times(Monomial::gen(g, e));
                }
            }
            JetPolynomial term = JetPolynomial::monomial(rest, c);
            if (power > 0) term = term * value.pow(power);
            out += term;
        }
        return out;
    }

  private:
    FiniteTypeSpec spec_;
    GaussQ gamma_;
    GaussQ r_;
    mutable std::map<int, JetPolynomial> elim_;
};

} // namespace cmckit
