#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "monomial.hpp"
#include "scalar.hpp"

namespace cmckit {

struct WeightReport {
    bool homogeneous = true;
    std::optional<int> weight; // absent for the zero polynomial
};

// Element of the jet ring: finite Gaussian-rational combination of
// monomials in gamma^{+-1}, r^{+-1} and the jet generators, kept in
// canonical order with no zero coefficients.
class JetPolynomial {
  public:
    using TermMap = std::map<Monomial, GaussQ, MonomialOrder>;

    JetPolynomial() = default;
    JetPolynomial(const GaussQ& c) {
        if (!c.isZero()) terms_[Monomial::one()] = c;
    }
    JetPolynomial(long n) : JetPolynomial(GaussQ(n)) {}

    static JetPolynomial monomial(Monomial m, GaussQ c = GaussQ(1)) {
        JetPolynomial p;
        if (!c.isZero()) p.terms_[std::move(m)] = std::move(c);
        return p;
    }
    static JetPolynomial gen(Generator g) { return monomial(Monomial::gen(g)); }
    static JetPolynomial z(int j) { return gen(zGen(j)); }
    static JetPolynomial zb(int j) { return gen(zbGen(j)); }
    static JetPolynomial w(int k) { return gen(wGen(k)); }
    static JetPolynomial wb(int k) { return gen(wbGen(k)); }
    static JetPolynomial gamma(int e = 1) { return monomial(Monomial(e, 0)); }
    static JetPolynomial r(int e = 1) { return monomial(Monomial(0, e)); }

    const TermMap& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }
    size_t termCount() const { return terms_.size(); }

    void addTerm(const Monomial& m, const GaussQ& c) {
        if (c.isZero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }

    GaussQ coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? GaussQ() : it->second;
    }

    GaussQ constantTerm() const { return coefficient(Monomial::one()); }

    JetPolynomial operator-() const {
        JetPolynomial out;
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }
    JetPolynomial& operator+=(const JetPolynomial& o) {
        for (const auto& [m, c] : o.terms_) addTerm(m, c);
        return *this;
    }
    JetPolynomial& operator-=(const JetPolynomial& o) {
        for (const auto& [m, c] : o.terms_) addTerm(m, -c);
        return *this;
    }
    friend JetPolynomial operator+(JetPolynomial a, const JetPolynomial& b) { return a += b; }
    friend JetPolynomial operator-(JetPolynomial a, const JetPolynomial& b) { return a -= b; }

    friend JetPolynomial operator*(const JetPolynomial& a, const JetPolynomial& b) {
        JetPolynomial out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) out.addTerm(ma.times(mb), ca * cb);
        return out;
    }
    JetPolynomial& operator*=(const JetPolynomial& o) { return *this = *this * o; }

    JetPolynomial scaled(const GaussQ& c) const {
        JetPolynomial out;
        if (c.isZero()) return out;
        for (const auto& [m, k] : terms_) out.terms_.emplace(m, k * c);
        return out;
    }

    // Multiply by gamma^g r^e (Laurent shift).
    JetPolynomial shifted(int gammaExp, int rExp) const {
        JetPolynomial out;
        for (const auto& [m, c] : terms_) {
            Monomial n = m;
            n.gammaExp += gammaExp;
            n.rExp += rExp;
            out.terms_.emplace(std::move(n), c);
        }
        return out;
    }

    JetPolynomial conj() const {
        JetPolynomial out;
        for (const auto& [m, c] : terms_) out.addTerm(m.conj(), c.conj());
        return out;
    }

    JetPolynomial pow(int e) const {
        if (e < 0) throw std::invalid_argument("JetPolynomial::pow: negative exponent");
        JetPolynomial out(1);
        JetPolynomial base = *this;
        while (e > 0) {
            if (e & 1) out *= base;
            base = (e >>= 1) ? base * base : base;
        }
        return out;
    }

    WeightReport weightReport() const {
        WeightReport rep;
        for (const auto& [m, c] : terms_) {
            int w = m.spectralWeight();
            if (!rep.weight) {
                rep.weight = w;
            } else if (*rep.weight != w) {
                rep.homogeneous = false;
                rep.weight.reset();
                break;
            }
        }
        return rep;
    }

    bool isHomogeneousOfWeight(int w) const {
        auto rep = weightReport();
        return rep.homogeneous && (isZero() || rep.weight == w);
    }

    bool zPure() const {
        for (const auto& [m, c] : terms_)
            if (!m.zPure()) return false;
        return true;
    }

    int maxGenIndex(GenKind kind) const {
        int mx = -1;
        for (const auto& [m, c] : terms_)
            for (const auto& [g, e] : m.exps)
                if (g.kind == kind) mx = std::max(mx, g.index);
        return mx;
    }

    friend bool operator==(const JetPolynomial& a, const JetPolynomial& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const JetPolynomial& a, const JetPolynomial& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : terms_) {
            if (!s.empty()) s += " + ";
            if (m.isConstant()) {
                s += c.str();
            } else if (c.isOne()) {
                s += m.str();
            } else {
                s += "(" + c.str() + ")*" + m.str();
            }
        }
        return s;
    }

  private:
    TermMap terms_;
};

inline JetPolynomial operator*(const GaussQ& c, const JetPolynomial& p) { return p.scaled(c); }

} // namespace cmckit
