#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmckit {

// Jet generators of the splitting ring: z_j, their conjugates, and the
// deformation generators w_k = h2^{-k/2} u_k. w_0 houses u itself; wbar_0
// does not exist (u is real, so it would alias w_0).
enum class GenKind : uint8_t { Z = 0, ZBar = 1, W = 2, WBar = 3 };

struct Generator {
    GenKind kind;
    int index;

    Generator(GenKind k, int idx) : kind(k), index(idx) {
        switch (k) {
            case GenKind::Z:
            case GenKind::ZBar:
                if (idx < 3) throw std::invalid_argument("z-generator index must be >= 3");
                break;
            case GenKind::W:
                if (idx < 0) throw std::invalid_argument("w-generator index must be >= 0");
                break;
            case GenKind::WBar:
                if (idx < 1) throw std::invalid_argument("wbar-generator index must be >= 1");
                break;
        }
    }

    int spectralWeight() const {
        switch (kind) {
            case GenKind::Z: return index - 2;
            case GenKind::ZBar: return -(index - 2);
            case GenKind::W: return index;
            case GenKind::WBar: return -index;
        }
        return 0;
    }

    Generator conj() const {
        switch (kind) {
            case GenKind::Z: return Generator(GenKind::ZBar, index);
            case GenKind::ZBar: return Generator(GenKind::Z, index);
            case GenKind::W:
                if (index == 0) return *this; // u is real
                return Generator(GenKind::WBar, index);
            case GenKind::WBar: return Generator(GenKind::W, index);
        }
        return *this;
    }

    std::string name() const {
        static const char* pre[] = {"z", "zb", "w", "wb"};
        return pre[static_cast<int>(kind)] + std::to_string(index);
    }

    friend auto operator<=>(const Generator& a, const Generator& b) = default;
};

inline Generator zGen(int j) { return Generator(GenKind::Z, j); }
inline Generator zbGen(int j) { return Generator(GenKind::ZBar, j); }
inline Generator wGen(int k) { return Generator(GenKind::W, k); }
inline Generator wbGen(int k) { return Generator(GenKind::WBar, k); }

// Monomial gamma^g * r^e * prod gen^exp. gamma and r are invertible; the
// generator exponents are strictly positive.
struct Monomial {
    int gammaExp = 0;
    int rExp = 0;
    std::vector<std::pair<Generator, int>> exps; // sorted by generator, exp > 0

    Monomial() = default;
    Monomial(int g, int r) : gammaExp(g), rExp(r) {}

    static Monomial one() { return Monomial(); }
    static Monomial gen(Generator g, int e = 1) {
        Monomial m;
        if (e != 0) m.exps.emplace_back(g, e);
        return m;
    }

    bool isConstant() const { return gammaExp == 0 && rExp == 0 && exps.empty(); }
    bool isGenFree() const { return exps.empty(); }

    int spectralWeight() const {
        int w = 0;
        for (const auto& [g, e] : exps) w += g.spectralWeight() * e;
        return w;
    }

    int genDegree() const {
        int d = 0;
        for (const auto& [g, e] : exps) d += e;
        return d;
    }

    int exponentOf(const Generator& g) const {
        for (const auto& [h, e] : exps)
            if (h == g) return e;
        return 0;
    }

    bool zPure() const {
        for (const auto& [g, e] : exps)
            if (g.kind != GenKind::Z) return false;
        return gammaExp == 0 && rExp == 0;
    }

    Monomial times(const Monomial& o) const {
        Monomial out;
        out.gammaExp = gammaExp + o.gammaExp;
        out.rExp = rExp + o.rExp;
        auto a = exps.begin(), b = o.exps.begin();
        while (a != exps.end() || b != o.exps.end()) {
            if (b == o.exps.end() || (a != exps.end() && a->first < b->first)) {
                out.exps.push_back(*a++);
            } else if (a == exps.end() || b->first < a->first) {
                out.exps.push_back(*b++);
            } else {
                int e = a->second + b->second;
                if (e != 0) out.exps.emplace_back(a->first, e);
                ++a;
                ++b;
            }
        }
        return out;
    }

    // Remove one power of g; precondition: exponentOf(g) >= 1.
    Monomial dividedByGen(const Generator& g) const {
        Monomial out = *this;
        for (auto it = out.exps.begin(); it != out.exps.end(); ++it) {
            if (it->first == g) {
                if (--it->second == 0) out.exps.erase(it);
                return out;
            }
        }
        throw std::logic_error("dividedByGen: generator absent");
    }

    Monomial conj() const {
        Monomial out(gammaExp, rExp);
        out.exps.reserve(exps.size());
        for (const auto& [g, e] : exps) out.exps.emplace_back(g.conj(), e);
        std::sort(out.exps.begin(), out.exps.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.gammaExp == b.gammaExp && a.rExp == b.rExp && a.exps == b.exps;
    }

    std::string str() const {
        if (isConstant()) return "1";
        std::string s;
        auto app = [&s](const std::string& t) {
            if (!s.empty()) s += "*";
            s += t;
        };
        if (gammaExp != 0) app(gammaExp == 1 ? "g" : "g^" + std::to_string(gammaExp));
        if (rExp != 0) app(rExp == 1 ? "r" : "r^" + std::to_string(rExp));
        for (const auto& [g, e] : exps) app(e == 1 ? g.name() : g.name() + "^" + std::to_string(e));
        return s;
    }
};

// Canonical term order: graded by spectral weight (descending, so leading
// terms carry the top jet generator), then lexicographic on gamma, r, and
// the generator exponent vectors.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int wa = a.spectralWeight(), wb = b.spectralWeight();
        if (wa != wb) return wa > wb;
        if (a.gammaExp != b.gammaExp) return a.gammaExp > b.gammaExp;
        if (a.rExp != b.rExp) return a.rExp > b.rExp;
        size_t i = 0;
        for (; i < a.exps.size() && i < b.exps.size(); ++i) {
            if (a.exps[i].first != b.exps[i].first) return a.exps[i].first < b.exps[i].first;
            if (a.exps[i].second != b.exps[i].second) return a.exps[i].second > b.exps[i].second;
        }
        return a.exps.size() > b.exps.size();
    }
};

} // namespace cmckit
