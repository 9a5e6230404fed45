#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace cmckit {

// Sparse Laurent polynomial in named commuting symbols over the Gaussian
// rationals. Used for the closed exterior systems of the finite-type
// analysis, where the variables are the Lie-Cartan coordinates rather than
// jet generators.
class SymPoly {
  public:
    using Mono = std::map<std::string, int>; // symbol -> exponent (nonzero)

    SymPoly() = default;
    SymPoly(const GaussQ& c) {
        if (!c.isZero()) terms_[Mono{}] = c;
    }
    SymPoly(long n) : SymPoly(GaussQ(n)) {}

    static SymPoly sym(const std::string& name, int exp = 1) {
        SymPoly p;
        if (exp == 0) return SymPoly(GaussQ(1));
        p.terms_[Mono{{name, exp}}] = GaussQ(1);
        return p;
    }

    const std::map<Mono, GaussQ>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    void add(const Mono& m, const GaussQ& c) {
        if (c.isZero()) return;
        auto [it, ins] = terms_.try_emplace(m, c);
        if (!ins) {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }

    SymPoly operator-() const {
        SymPoly out;
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }
    SymPoly& operator+=(const SymPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    SymPoly& operator-=(const SymPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, -c);
        return *this;
    }
    friend SymPoly operator+(SymPoly a, const SymPoly& b) { return a += b; }
    friend SymPoly operator-(SymPoly a, const SymPoly& b) { return a -= b; }
    friend SymPoly operator*(const SymPoly& a, const SymPoly& b) {
        SymPoly out;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Mono m = ma;
                for (const auto& [s, e] : mb)
                    if ((m[s] += e) == 0) m.erase(s);
                out.add(m, ca * cb);
            }
        }
        return out;
    }
    SymPoly& operator*=(const SymPoly& o) { return *this = *this * o; }
    SymPoly scaled(const GaussQ& c) const {
        SymPoly out;
        if (c.isZero()) return out;
        for (const auto& [m, v] : terms_) out.terms_.emplace(m, v * c);
        return out;
    }
    SymPoly pow(int e) const {
        if (e < 0) throw std::invalid_argument("SymPoly::pow: negative exponent");
        SymPoly out(1);
        for (int i = 0; i < e; ++i) out *= *this;
        return out;
    }

    friend bool operator==(const SymPoly& a, const SymPoly& b) { return a.terms_ == b.terms_; }

    // Derivation by a rule table symbol -> derivative (Leibniz, Laurent-aware:
    // d(x^e) = e x^{e-1} dx).
    SymPoly derive(const std::function<SymPoly(const std::string&)>& rule) const {
        SymPoly out;
        for (const auto& [m, c] : terms_) {
            for (const auto& [s, e] : m) {
                SymPoly ds = rule(s);
                if (ds.isZero()) continue;
                Mono rest = m;
                if ((rest[s] -= 1) == 0) rest.erase(s);
                SymPoly part;
                part.terms_[rest] = c * GaussQ(e);
                out += part * ds;
            }
        }
        return out;
    }

    // Substitute exact numeric values for every symbol.
    GaussQ evaluate(const std::map<std::string, GaussQ>& values) const {
        GaussQ total;
        for (const auto& [m, c] : terms_) {
            GaussQ term = c;
            for (const auto& [s, e] : m) {
                GaussQ v = values.at(s);
                GaussQ p(1);
                for (int i = 0; i < std::abs(e); ++i) p *= v;
                if (e < 0) p = p.inverse();
                term *= p;
            }
            total += term;
        }
        return total;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            for (const auto& [s, e] : m) out += "*" + s + (e == 1 ? "" : "^" + std::to_string(e));
        }
        return out;
    }

  private:
    std::map<Mono, GaussQ> terms_;
};

// Eliminate an inverse symbol inv that satisfies inv * rel = 1: the input,
// graded by inv-exponent as sum_k c_k inv^k, vanishes modulo the relation
// iff sum_k c_k rel^{K-k} = 0 with K the largest exponent. (rel is not a
// zero divisor, so this is exact.)
inline SymPoly eliminateInverse(const SymPoly& p, const std::string& inv, const SymPoly& rel) {
    int K = 0;
    for (const auto& [m, c] : p.terms()) {
        auto it = m.find(inv);
        if (it != m.end()) K = std::max(K, it->second);
    }
    SymPoly out;
    for (const auto& [m, c] : p.terms()) {
        SymPoly::Mono rest = m;
        int k = 0;
        if (auto it = rest.find(inv); it != rest.end()) {
            k = it->second;
            rest.erase(inv);
        }
        SymPoly term;
        term.add(rest, c);
        out += term * rel.pow(K - k);
    }
    return out;
}

} // namespace cmckit
