#pragma once

#include <map>
#include <mutex>
#include <stdexcept>

#include "jetpoly.hpp"

namespace cmckit {

struct TruncationExceeded : std::runtime_error {
    explicit TruncationExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Derivation rules mod the contact ideal. The generator index bound
// auto-extends on demand; crossing hardCap is an error, never a silent
// truncation. wRewrite installs the inhomogeneous-Jacobi reduction for
// dOmegaBar(w_k); disabling it treats u as formally holomorphic
// (dOmegaBar(w_1) = 0), the negative control for the psi_j closedness.
struct DerivationRules {
    int hardCap = 25;
    bool wRewrite = true;

    void checkIndex(int j) const {
        if (j > hardCap)
            throw TruncationExceeded("generator index " + std::to_string(j) +
                                     " exceeds configured cap " + std::to_string(hardCap));
    }
};

inline const DerivationRules& defaultRules() {
    static DerivationRules rules;
    return rules;
}

class Derivation {
  public:
    explicit Derivation(DerivationRules rules = defaultRules()) : rules_(rules) {}

    const DerivationRules& rules() const { return rules_; }

    // T^_j, the omega-bar derivative coefficient of z_j:
    //   T^_3 = g^2 - r^2,  T^_{j+1} = dOmega(T^_j) + ((j-1)/2) z3 T^_j + (j/2)(g^2-r^2) z_j.
    const JetPolynomial& that(int j) {
        if (j < 3) throw std::invalid_argument("that: j must be >= 3");
        {
            std::lock_guard<std::mutex> lk(thatMutex());
            auto it = thatCache().find(j);
            if (it != thatCache().end()) return it->second;
        }
        JetPolynomial val;
        if (j == 3) {
            val = JetPolynomial::gamma(2) - JetPolynomial::r(2);
        } else {
            int i = j - 1; // T^_{i+1} from T^_i
            JetPolynomial prev = that(i);
            val = dOmega(prev) + GaussQ(i - 1, 2) * (JetPolynomial::z(3) * prev) +
                  GaussQ(i, 2) * ((JetPolynomial::gamma(2) - JetPolynomial::r(2)) * JetPolynomial::z(i));
        }
        std::lock_guard<std::mutex> lk(thatMutex());
        return thatCache().try_emplace(j, std::move(val)).first->second;
    }

    JetPolynomial dOmega(const JetPolynomial& p) { return derive(p, Dir::Omega); }
    JetPolynomial dOmegaBar(const JetPolynomial& p) { return derive(p, Dir::OmegaBar); }

    // E(A) = r * A_{omega,omegabar} + (1/2)(g^2 + r^2) A, written so that a
    // Jacobi field is exactly an element of the kernel.
    JetPolynomial jacobiE(const JetPolynomial& p) {
        return JetPolynomial::r(1) * dOmegaBar(dOmega(p)) +
               GaussQ(1, 2) * ((JetPolynomial::gamma(2) + JetPolynomial::r(2)) * p);
    }

    // Seed the memo table (used by the CMC_LADDER_CACHE support).
    void installThat(int j, JetPolynomial val) {
        std::lock_guard<std::mutex> lk(thatMutex());
        thatCache().try_emplace(j, std::move(val));
    }
    std::map<int, JetPolynomial> snapshotThat() {
        std::lock_guard<std::mutex> lk(thatMutex());
        return thatCache();
    }

  private:
    enum class Dir { Omega, OmegaBar };

    DerivationRules rules_;

    // Process-wide write-once caches; entries only depend on the index.
    static std::map<int, JetPolynomial>& thatCache() {
        static std::map<int, JetPolynomial> cache;
        return cache;
    }
    static std::mutex& thatMutex() {
        static std::mutex m;
        return m;
    }
    std::map<int, JetPolynomial> wbarCache_; // depends on wRewrite, kept per instance

    JetPolynomial ruleOmega(const Generator& g) {
        switch (g.kind) {
            case GenKind::Z: // z_{j+1} - (j/2) z3 z_j
                rules_.checkIndex(g.index + 1);
                return JetPolynomial::z(g.index + 1) -
                       GaussQ(g.index, 2) * (JetPolynomial::z(3) * JetPolynomial::z(g.index));
            case GenKind::ZBar: // conj(T^_j) r^{-1}
                return that(g.index).conj().shifted(0, -1);
            case GenKind::W: // w_{k+1} - (k/2) z3 w_k
                rules_.checkIndex(g.index + 1);
                return JetPolynomial::w(g.index + 1) -
                       GaussQ(g.index, 2) * (JetPolynomial::z(3) * JetPolynomial::w(g.index));
            case GenKind::WBar:
                return omegaBarW(g.index).conj();
        }
        return {};
    }

    JetPolynomial ruleOmegaBar(const Generator& g) {
        switch (g.kind) {
            case GenKind::Z:
                return that(g.index).shifted(0, -1);
            case GenKind::ZBar:
                rules_.checkIndex(g.index + 1);
                return JetPolynomial::zb(g.index + 1) -
                       GaussQ(g.index, 2) * (JetPolynomial::zb(3) * JetPolynomial::zb(g.index));
            case GenKind::W:
                if (g.index == 0) return JetPolynomial::wb(1); // u is real
                return omegaBarW(g.index);
            case GenKind::WBar:
                rules_.checkIndex(g.index + 1);
                return JetPolynomial::wb(g.index + 1) -
                       GaussQ(g.index, 2) * (JetPolynomial::zb(3) * JetPolynomial::wb(g.index));
        }
        return {};
    }

    // dOmegaBar(w_k) reduced through the inhomogeneous Jacobi relation
    // E(u) = h2 h2bar and the derivative-commutation identity:
    //   dOmegaBar(w_1) = r - (1/2)(g^2+r^2) r^{-1} w_0,
    //   dOmegaBar(w_k) = dOmega(dOmegaBar(w_{k-1}))
    //                    + ((k-1)/2) z3 dOmegaBar(w_{k-1})
    //                    + ((k-1)/2)(g^2-r^2) r^{-1} w_{k-1},   k >= 2.
    const JetPolynomial& omegaBarW(int k) {
        if (k < 1) throw std::invalid_argument("omegaBarW: k must be >= 1");
        auto it = wbarCache_.find(k);
        if (it != wbarCache_.end()) return it->second;
        JetPolynomial val;
        if (k == 1) {
            if (rules_.wRewrite)
                val = JetPolynomial::r(1) -
                      GaussQ(1, 2) * ((JetPolynomial::gamma(2) + JetPolynomial::r(2)).shifted(0, -1) *
                                      JetPolynomial::w(0));
        } else {
            JetPolynomial prev = omegaBarW(k - 1);
            val = dOmega(prev) + GaussQ(k - 1, 2) * (JetPolynomial::z(3) * prev) +
                  GaussQ(k - 1, 2) *
                      ((JetPolynomial::gamma(2) - JetPolynomial::r(2)).shifted(0, -1) * JetPolynomial::w(k - 1));
        }
        return wbarCache_.emplace(k, std::move(val)).first->second;
    }

    JetPolynomial derive(const JetPolynomial& p, Dir dir) {
        JetPolynomial out;
        for (const auto& [m, c] : p.terms()) {
            // gamma is constant; d r^e = (e/2) r^e z3 (resp. z3bar).
            if (m.rExp != 0) {
                Monomial n = m;
                JetPolynomial zfac = dir == Dir::Omega ? JetPolynomial::z(3) : JetPolynomial::zb(3);
                out += (GaussQ(m.rExp, 2) * c) * (JetPolynomial::monomial(n) * zfac);
            }
            for (const auto& [g, e] : m.exps) {
                JetPolynomial rule = dir == Dir::Omega ? ruleOmega(g) : ruleOmegaBar(g);
                if (rule.isZero()) continue;
                Monomial rest = m.dividedByGen(g);
                out += (GaussQ(e) * c) * (JetPolynomial::monomial(rest) * rule);
            }
        }
        return out;
    }
};

} // namespace cmckit
