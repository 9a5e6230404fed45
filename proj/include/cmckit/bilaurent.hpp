#pragma once

#include <limits>
#include <map>

#include "scalar.hpp"

namespace cmckit {

struct TruncationInsufficient : std::runtime_error {
    explicit TruncationInsufficient(const std::string& what) : std::runtime_error(what) {}
};

// Truncated Laurent series in w, wbar with exact coefficients. `trunc` is
// the highest total degree a+b whose coefficients are certified; arithmetic
// propagates certification conservatively.
class BiLaurent {
  public:
    static constexpr int kInf = std::numeric_limits<int>::max() / 4;

    using Key = std::pair<int, int>; // (w exponent, wbar exponent)

    explicit BiLaurent(int trunc = kInf) : trunc_(trunc) {}

    static BiLaurent constant(const GaussQ& c, int trunc) {
        BiLaurent s(trunc);
        s.add(0, 0, c);
        return s;
    }
    static BiLaurent monomial(int a, int b, const GaussQ& c, int trunc) {
        BiLaurent s(trunc);
        s.add(a, b, c);
        return s;
    }

    int truncation() const { return trunc_; }
    const std::map<Key, GaussQ>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    void add(int a, int b, const GaussQ& c) {
        if (c.isZero() || a + b > trunc_) return;
        auto [it, ins] = terms_.try_emplace(Key{a, b}, c);
        if (!ins) {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }

    GaussQ coefficient(int a, int b) const {
        auto it = terms_.find(Key{a, b});
        return it == terms_.end() ? GaussQ() : it->second;
    }

    // Smallest total degree of a nonzero term.
    int valuation() const {
        int v = kInf;
        for (const auto& [k, c] : terms_) v = std::min(v, k.first + k.second);
        return v;
    }
    // Smallest w-exponent of a nonzero term.
    int valuationW() const {
        int v = kInf;
        for (const auto& [k, c] : terms_) v = std::min(v, k.first);
        return v;
    }

    BiLaurent operator-() const {
        BiLaurent out(trunc_);
        for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
        return out;
    }
    friend BiLaurent operator+(const BiLaurent& x, const BiLaurent& y) {
        BiLaurent out(std::min(x.trunc_, y.trunc_));
        for (const auto& [k, c] : x.terms_) out.add(k.first, k.second, c);
        for (const auto& [k, c] : y.terms_) out.add(k.first, k.second, c);
        return out;
    }
    friend BiLaurent operator-(const BiLaurent& x, const BiLaurent& y) { return x + (-y); }

    friend BiLaurent operator*(const BiLaurent& x, const BiLaurent& y) {
        long tx = x.isZero() ? kInf : std::min<long>(kInf, (long)x.trunc_ + y.valuation());
        long ty = y.isZero() ? kInf : std::min<long>(kInf, (long)y.trunc_ + x.valuation());
        BiLaurent out(static_cast<int>(std::min({tx, ty, (long)kInf})));
        for (const auto& [ka, ca] : x.terms_)
            for (const auto& [kb, cb] : y.terms_)
                out.add(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return out;
    }

    BiLaurent scaled(const GaussQ& c) const {
        BiLaurent out(trunc_);
        if (c.isZero()) return out;
        for (const auto& [k, v] : terms_) out.terms_.emplace(k, v * c);
        return out;
    }

    BiLaurent shifted(int da, int db) const {
        BiLaurent out(trunc_ + da + db);
        for (const auto& [k, v] : terms_) out.terms_.emplace(Key{k.first + da, k.second + db}, v);
        return out;
    }

    BiLaurent conj() const {
        BiLaurent out(trunc_);
        for (const auto& [k, v] : terms_) out.terms_.emplace(Key{k.second, k.first}, v.conj());
        return out;
    }

    // d/dz with z = w^2: w^a wbar^b -> (a/2) w^{a-2} wbar^b. Valid on series
    // with even w-exponents (everything built from z-jets).
    BiLaurent dz() const {
        BiLaurent out(trunc_ - 2);
        for (const auto& [k, v] : terms_) {
            if (k.first == 0) continue;
            if (k.first % 2 != 0) throw std::logic_error("BiLaurent::dz on odd w-exponent");
            out.add(k.first - 2, k.second, GaussQ(k.first, 2) * v);
        }
        return out;
    }

    BiLaurent dw() const {
        BiLaurent out(trunc_ - 1);
        for (const auto& [k, v] : terms_)
            if (k.first != 0) out.add(k.first - 1, k.second, GaussQ(k.first) * v);
        return out;
    }
    BiLaurent dwBar() const {
        BiLaurent out(trunc_ - 1);
        for (const auto& [k, v] : terms_)
            if (k.second != 0) out.add(k.first, k.second - 1, GaussQ(k.second) * v);
        return out;
    }

    BiLaurent truncated(int t) const {
        BiLaurent out(std::min(t, trunc_));
        for (const auto& [k, v] : terms_)
            if (k.first + k.second <= out.trunc_) out.terms_.emplace(k, v);
        return out;
    }

    // exp series of a positive-valuation argument.
    static BiLaurent exp(const BiLaurent& x) {
        if (!x.isZero() && x.valuation() < 1)
            throw std::invalid_argument("BiLaurent::exp needs positive valuation");
        BiLaurent out = constant(GaussQ(1), x.trunc_);
        BiLaurent pow = constant(GaussQ(1), x.trunc_);
        mpq_class fact(1);
        for (int k = 1; k <= x.trunc_; ++k) {
            pow = pow * x;
            if (pow.isZero()) break;
            fact *= k;
            out = out + pow.scaled(GaussQ(mpq_class(1) / fact));
        }
        out.trunc_ = x.trunc_;
        return out;
    }

    friend bool operator==(const BiLaurent& x, const BiLaurent& y) {
        return x.terms_ == y.terms_;
    }

  private:
    int trunc_;
    std::map<Key, GaussQ> terms_;
};

} // namespace cmckit
