#pragma once

#include "finitetype.hpp"
#include "sympoly.hpp"

namespace cmckit {

struct NotCompatible : std::runtime_error {
    explicit NotCompatible(const std::string& what) : std::runtime_error(what) {}
};

struct D2Report {
    bool ok = true;
    std::vector<std::pair<std::string, std::string>> residuals; // variable -> 2-form residual

    void record(const std::string& var, const SymPoly& residual) {
        if (!residual.isZero()) {
            ok = false;
            residuals.emplace_back(var, residual.str());
        }
    }
};

// Closed Lie-Cartan structure system of the linear finite-type relation
//   A^{n+1} = sum_{j=1}^{n} (U_j A^j + V_j conj(A^j))
// over the invariant structure equations (d omega = 0):
//   dr   = r/2 (A1 omega + cA1 omegabar),
//   dA^k = B^k omega - r^{-1} (g^2 B^{k-1} + (g^2-r^2)/2 C^{k-1}) omegabar,
//   dB^k = (A^{k+1} + A1 (B^k + C^k)/2) omega - (g^2+r^2)/(2r) A^k omegabar,
//   dC^k = -(A^{k+1} + A1 C^k / 2) omega + g^2 r^{-1} A^k omegabar,
// with B^0 = 0, C^0 = -2, C^n eliminated through the compatibility relation
// and the constants adapted as |V_n|^2 = g^2, V_j = -V_n conj(U_{j+1}).
// Symbols: r, g (gamma), A1..An, B1..Bn, C1..C(n-1), prefixed c* conjugates,
// U1..Un / cU1..cUn, Vn (conj(Vn) = g^2 Vn^{-1}), and Dinv = (g^2-r^2)^{-1}.
class FiniteTypeClosedSystem {
  public:
    explicit FiniteTypeClosedSystem(int level) : n_(level) {
        if (level < 1 || level > 4)
            throw std::invalid_argument("closed system tractable for levels 1..4");
        build();
    }

    // d^2 = 0 on every variable of the closed system, exactly.
    D2Report d2Check() const {
        D2Report rep;
        for (const auto& [name, rules] : vars_) {
            SymPoly residual = derive(rules.second, Dir::Omega) - derive(rules.first, Dir::OmegaBar);
            rep.record(name, reduce(residual));
        }
        return rep;
    }

    const std::map<std::string, std::pair<SymPoly, SymPoly>>& variables() const { return vars_; }

    // Structure coefficients, eliminations applied.
    SymPoly dOmega(const std::string& var) const { return vars_.at(var).first; }
    SymPoly dOmegaBar(const std::string& var) const { return vars_.at(var).second; }

    // Reduce modulo Dinv (g^2 - r^2) = 1; residuals must vanish identically.
    SymPoly reduce(const SymPoly& p) const {
        return eliminateInverse(p, "Dinv", g2() - r2());
    }

    SymPoly derive(const SymPoly& p, bool omegaBar) const {
        return derive(p, omegaBar ? Dir::OmegaBar : Dir::Omega);
    }

  private:
    enum class Dir { Omega, OmegaBar };
    int n_;
    // variable -> (dOmega coefficient, dOmegaBar coefficient)
    std::map<std::string, std::pair<SymPoly, SymPoly>> vars_;

    static SymPoly S(const std::string& s, int e = 1) { return SymPoly::sym(s, e); }
    static SymPoly g2() { return S("g", 2); }
    static SymPoly r2() { return S("r", 2); }
    static std::string idx(const std::string& base, int k) { return base + std::to_string(k); }

    SymPoly A(int k) const {
        if (k == 0) return {};
        if (k <= n_) return S(idx("A", k));
        return topA();
    }
    SymPoly cA(int k) const { return conjugate(A(k)); }
    SymPoly B(int k) const { return k == 0 ? SymPoly() : S(idx("B", k)); }
    SymPoly C(int k) const {
        if (k == 0) return SymPoly(GaussQ(-2));
        if (k <= n_ - 1) return S(idx("C", k));
        return topC();
    }
    SymPoly Uc(int k) const { return S(idx("U", k)); }
    SymPoly cUc(int k) const { return S(idx("cU", k)); }
    SymPoly Vc(int k) const {
        if (k == n_) return S("Vn");
        return -(S("Vn") * cUc(k + 1)); // adapted: V_j = -V_n conj(U_{j+1})
    }
    SymPoly cVc(int k) const { return conjugate(Vc(k)); }

    // A^{n+1} from the finite-type relation.
    SymPoly topA() const {
        SymPoly out;
        for (int j = 1; j <= n_; ++j) out += Uc(j) * S(idx("A", j)) + Vc(j) * S(idx("cA", j));
        return out;
    }

    // C^n from the compatibility relation (Dinv = (g^2-r^2)^{-1}):
    //   C^n = 2 Dinv sum_{j=1}^{n-1} [U_{j+1} (g^2 B^j + (g^2-r^2)/2 C^j) - r V_j cB^j]
    //         - 2 Dinv (g^2 B^n + r V_n cB^n) - 2 U_1.
    SymPoly topC() const {
        SymPoly sum;
        for (int j = 1; j <= n_ - 1; ++j) {
            SymPoly inner = Uc(j + 1) * (g2() * S(idx("B", j)) +
                                         (g2() - r2()).scaled(GaussQ(1, 2)) * S(idx("C", j))) -
                            S("r") * Vc(j) * S(idx("cB", j));
            sum += inner;
        }
        SymPoly out = S("Dinv") * sum.scaled(GaussQ(2));
        out -= S("Dinv") * (g2() * S(idx("B", n_)) + S("r") * S("Vn") * S(idx("cB", n_)))
                   .scaled(GaussQ(2));
        out -= Uc(1).scaled(GaussQ(2));
        return out;
    }

    // Formal conjugation: swap plain/conjugate symbols, conj coefficients,
    // and conj(Vn) = g^2 / Vn.
    static SymPoly conjugate(const SymPoly& p) {
        SymPoly out;
        for (const auto& [m, c] : p.terms()) {
            SymPoly::Mono nm;
            for (const auto& [s, e] : m) {
                if (s == "Vn") {
                    nm["Vn"] -= e;
                    nm["g"] += 2 * e;
                } else if (s.rfind("c", 0) == 0 && s != "c") {
                    nm[s.substr(1)] += e;
                } else if (s == "r" || s == "g" || s == "Dinv") {
                    nm[s] += e;
                } else {
                    nm["c" + s] += e;
                }
            }
            for (auto it = nm.begin(); it != nm.end();) {
                if (it->second == 0)
                    it = nm.erase(it);
                else
                    ++it;
            }
            SymPoly term;
            term.add(nm, c.conj());
            out += term;
        }
        return out;
    }

    void installVar(const std::string& name, SymPoly om, SymPoly omBar) {
        vars_[name] = {om, omBar};
        vars_["c" + name] = {conjugate(omBar), conjugate(om)};
    }

    void build() {
        // dr is real: r/2 (A1 omega + cA1 omegabar).
        SymPoly half = SymPoly(GaussQ(1, 2));
        vars_["r"] = {half * S("r") * S("A1"), half * S("r") * S("cA1")};
        // Dinv = (g^2-r^2)^{-1}: dDinv = Dinv^2 * 2r dr.
        vars_["Dinv"] = {S("Dinv", 2) * r2() * S("A1"), S("Dinv", 2) * r2() * S("cA1")};

        for (int k = 1; k <= n_; ++k) {
            SymPoly omA = B(k);
            SymPoly obA = -(S("r", -1) * (g2() * B(k - 1) +
                                          (g2() - r2()).scaled(GaussQ(1, 2)) * C(k - 1)));
            installVar(idx("A", k), omA, obA);

            SymPoly omB = A(k + 1) + half * S("A1") * (B(k) + C(k));
            SymPoly obB = -(half * S("r", -1) * (g2() + r2()) * S(idx("A", k)));
            installVar(idx("B", k), omB, obB);

            if (k <= n_ - 1) {
                SymPoly omC = -(A(k + 1) + half * S("A1") * C(k));
                SymPoly obC = g2() * S("r", -1) * S(idx("A", k));
                installVar(idx("C", k), omC, obC);
            }
        }
    }

    SymPoly derive(const SymPoly& p, Dir dir) const {
        return p.derive([this, dir](const std::string& s) -> SymPoly {
            auto it = vars_.find(s);
            if (it != vars_.end())
                return dir == Dir::Omega ? it->second.first : it->second.second;
            return {}; // g, U, V constants
        });
    }
};

// Level-1 branch with |V_1|^2 != gamma^2: B1 is also eliminated,
//   B1 = (A1 / cA1) (g^2 - r^2) / r,
// leaving the closed system on r, A1, cA1 alone.
class Level1SecondBranch {
  public:
    Level1SecondBranch() {
        SymPoly half(GaussQ(1, 2));
        SymPoly B1 = S("A1") * S("cA1", -1) * (g2() - r2()) * S("r", -1);
        SymPoly cB1 = S("cA1") * S("A1", -1) * (g2() - r2()) * S("r", -1);
        vars_["r"] = {half * S("r") * S("A1"), half * S("r") * S("cA1")};
        vars_["A1"] = {B1, (g2() - r2()) * S("r", -1)};
        vars_["cA1"] = {(g2() - r2()) * S("r", -1), cB1};
    }

    D2Report d2Check() const {
        D2Report rep;
        for (const auto& [name, rules] : vars_) {
            SymPoly residual = derive(rules.second) - deriveBar(rules.first);
            rep.record(name, residual);
        }
        return rep;
    }

  private:
    std::map<std::string, std::pair<SymPoly, SymPoly>> vars_;

    static SymPoly S(const std::string& s, int e = 1) { return SymPoly::sym(s, e); }
    static SymPoly g2() { return S("g", 2); }
    static SymPoly r2() { return S("r", 2); }

    SymPoly derive(const SymPoly& p) const {
        return p.derive([this](const std::string& s) -> SymPoly {
            auto it = vars_.find(s);
            return it != vars_.end() ? it->second.first : SymPoly{};
        });
    }
    SymPoly deriveBar(const SymPoly& p) const {
        return p.derive([this](const std::string& s) -> SymPoly {
            auto it = vars_.find(s);
            return it != vars_.end() ? it->second.second : SymPoly{};
        });
    }
};

} // namespace cmckit
