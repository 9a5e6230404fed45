#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "derivation.hpp"

namespace cmckit {

// Monomial bases for the exact linear solves.
namespace basis {

// z-pure monomials of spectral weight w using generators z_3..z_maxIndex,
// i.e. partitions of w into parts 1..maxIndex-2 with part p standing for
// z_{p+2}.
inline std::vector<Monomial> zPure(int w, int maxIndex) {
    std::vector<Monomial> out;
    if (w < 0) return out;
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int remaining, int maxPart) {
        if (remaining == 0) {
            Monomial m;
            int run = 0, cur = 0;
            for (int p : parts) {
                if (p == cur) {
                    ++run;
                } else {
                    if (run > 0) m.exps.emplace_back(zGen(cur + 2), run);
                    cur = p;
                    run = 1;
                }
            }
            if (run > 0) m.exps.emplace_back(zGen(cur + 2), run);
            std::sort(m.exps.begin(), m.exps.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            out.push_back(std::move(m));
            return;
        }
        for (int p = std::min(remaining, maxPart); p >= 1; --p) {
            parts.push_back(p);
            rec(remaining - p, p);
            parts.pop_back();
        }
    };
    if (w == 0) {
        out.push_back(Monomial::one());
    } else {
        rec(w, std::max(1, maxIndex - 2));
    }
    return out;
}

// The same z-pure support tensored with a gamma-Laurent exponent range.
inline std::vector<Monomial> zPureGammaRange(int w, int maxIndex, int gammaMin, int gammaMax) {
    std::vector<Monomial> out;
    for (const Monomial& m : zPure(w, maxIndex)) {
        for (int g = gammaMin; g <= gammaMax; ++g) {
            Monomial n = m;
            n.gammaExp = g;
            out.push_back(std::move(n));
        }
    }
    return out;
}

} // namespace basis

// Exact linear solve A x = b over the Gaussian rationals, where column i of
// A holds the monomial coefficients of images[i]. Returns a particular
// solution and the kernel dimension, or nullopt when inconsistent.
struct LinearSolveResult {
    std::vector<GaussQ> solution;
    int kernelDim = 0;
};

inline std::optional<LinearSolveResult> solveExact(const std::vector<JetPolynomial>& images,
                                                   const JetPolynomial& target) {
    std::map<Monomial, int, MonomialOrder> rowIndex;
    auto rowOf = [&rowIndex](const Monomial& m) {
        return rowIndex.try_emplace(m, static_cast<int>(rowIndex.size())).first->second;
    };
    for (const auto& img : images)
        for (const auto& [m, c] : img.terms()) rowOf(m);
    for (const auto& [m, c] : target.terms()) rowOf(m);

    const int rows = static_cast<int>(rowIndex.size());
    const int cols = static_cast<int>(images.size());
    std::vector<std::vector<GaussQ>> a(rows, std::vector<GaussQ>(cols + 1));
    for (int j = 0; j < cols; ++j)
        for (const auto& [m, c] : images[j].terms()) a[rowOf(m)][j] = c;
    for (const auto& [m, c] : target.terms()) a[rowOf(m)][cols] = c;

    std::vector<int> pivotCol(rows, -1);
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (!a[r][col].isZero()) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        GaussQ inv = a[rank][col].inverse();
        for (int j = col; j <= cols; ++j) a[rank][j] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][col].isZero()) continue;
            GaussQ f = a[r][col];
            for (int j = col; j <= cols; ++j) a[r][j] -= f * a[rank][j];
        }
        pivotCol[rank] = col;
        ++rank;
    }
    for (int r = rank; r < rows; ++r)
        if (!a[r][cols].isZero()) return std::nullopt;

    LinearSolveResult res;
    res.solution.assign(cols, GaussQ());
    for (int r = 0; r < rank; ++r) res.solution[pivotCol[r]] = a[r][cols];
    res.kernelDim = cols - rank;
    return res;
}

// Outcome of an antiderivative search; Obstructed is the cohomological
// obstruction and is used positively by the nontriviality tests.
struct Antiderivative {
    std::optional<JetPolynomial> witness;
    bool obstructed() const { return !witness.has_value(); }
};

class JetSolver {
  public:
    explicit JetSolver(Derivation& der) : der_(der) {}

    // Solve dOmegaBar(C) = target for the unique z-pure homogeneous C of the
    // given spectral weight with zero constant term. The target must be
    // homogeneous of weight-1 inside r^{-1} Q[g^2, r^2, z].
    Antiderivative antiderivativeOmegaBar(const JetPolynomial& target, int weight) {
        if (target.isZero()) return {JetPolynomial()};
        if (!target.isHomogeneousOfWeight(weight - 1))
            throw std::invalid_argument("antiderivativeOmegaBar: target not homogeneous of weight-1");
        int maxIdx = std::max(target.maxGenIndex(GenKind::Z) + 1, weight + 2);
        std::vector<Monomial> cand = basis::zPure(weight, maxIdx);
        dropConstant(cand);
        std::vector<JetPolynomial> images;
        images.reserve(cand.size());
        for (const auto& m : cand) images.push_back(der_.dOmegaBar(JetPolynomial::monomial(m)));
        auto sol = solveExact(images, target);
        if (!sol) return {};
        if (sol->kernelDim != 0)
            throw std::logic_error("antiderivativeOmegaBar: non-trivial kernel (only constants "
                                   "should be dOmegaBar-closed)");
        return {assemble(cand, sol->solution)};
    }

    // Solve dOmega(F) = f and dOmegaBar(F) = g jointly, zero constant term.
    // For zbar-free inputs the candidate space below is complete: an
    // r-carrying candidate would contribute a z3bar-sector that nothing can
    // cancel, and the gamma-exponents of an image only move up from the
    // source by the even steps of the T^ coefficients.
    Antiderivative jointAntiderivative(const JetPolynomial& f, const JetPolynomial& g) {
        if (f.isZero() && g.isZero()) return {JetPolynomial()};
        if (f.maxGenIndex(GenKind::ZBar) >= 0 || g.maxGenIndex(GenKind::ZBar) >= 0 ||
            f.maxGenIndex(GenKind::WBar) >= 0 || g.maxGenIndex(GenKind::WBar) >= 0)
            throw std::invalid_argument("jointAntiderivative: conjugate-sector inputs unsupported");
        auto repF = f.weightReport();
        auto repG = g.weightReport();
        if (!repF.homogeneous || !repG.homogeneous)
            throw std::invalid_argument("jointAntiderivative: inputs must be homogeneous");
        int weight;
        if (repF.weight && repG.weight) {
            if (*repF.weight - 1 != *repG.weight + 1)
                throw std::invalid_argument("jointAntiderivative: incompatible weights");
            weight = *repF.weight - 1;
        } else if (repF.weight) {
            weight = *repF.weight - 1;
        } else {
            weight = *repG.weight + 1;
        }

        int maxIdx = std::max({f.maxGenIndex(GenKind::Z), g.maxGenIndex(GenKind::Z), weight + 2});
        auto [gMin, gMax] = gammaRange(f, g);
        std::vector<Monomial> cand = basis::zPureGammaRange(weight, maxIdx, gMin - 2 * (weight + 3), gMax);
        dropConstant(cand);
        if (hasW(f) || hasW(g)) appendWSector(cand, weight, maxIdx, gMin - 2 * (weight + 3), gMax);

        std::vector<JetPolynomial> images;
        images.reserve(cand.size());
        // Stack the two systems: row space of dOmega images paired with f,
        // plus the dOmegaBar images paired with g, tagged apart by an
        // auxiliary r-shift that cannot collide (images of z-pure monomials
        // have r-exponents >= -degree, so shifting the second copy far down
        // keeps the sectors disjoint).
        int shift = -(4 * (weight + 4));
        for (const auto& m : cand) {
            JetPolynomial mono = JetPolynomial::monomial(m);
            images.push_back(der_.dOmega(mono) + der_.dOmegaBar(mono).shifted(0, shift));
        }
        JetPolynomial target = f + g.shifted(0, shift);
        auto sol = solveExact(images, target);
        if (!sol) return {};
        return {assemble(cand, sol->solution)};
    }

    // Basis of { P z-pure, homogeneous of the given weight != 0 :
    // dOmegaBar(P) = 0 }. Expected empty: only constants are dOmegaBar-closed.
    std::vector<JetPolynomial> holomorphicKernel(int weight, int maxIndex) {
        if (weight == 0)
            throw std::invalid_argument("holomorphicKernel: weight 0 is spanned by constants");
        std::vector<Monomial> cand = basis::zPure(weight, maxIndex);
        std::vector<JetPolynomial> images;
        images.reserve(cand.size());
        for (const auto& m : cand) images.push_back(der_.dOmegaBar(JetPolynomial::monomial(m)));
        return nullspace(cand, images);
    }

    // Kernel of jacobiE on z-pure homogeneous polynomials of the given
    // weight; the independent oracle for the Jacobi-field classification.
    std::vector<JetPolynomial> jacobiKernel(int weight, int maxIndex) {
        std::vector<Monomial> cand = basis::zPure(weight, maxIndex);
        std::vector<JetPolynomial> images;
        images.reserve(cand.size());
        for (const auto& m : cand) images.push_back(der_.jacobiE(JetPolynomial::monomial(m)));
        return nullspace(cand, images);
    }

  private:
    Derivation& der_;

    static void dropConstant(std::vector<Monomial>& cand) {
        std::erase_if(cand, [](const Monomial& m) { return m.isConstant(); });
    }

    static bool hasW(const JetPolynomial& p) { return p.maxGenIndex(GenKind::W) >= 0; }

    static std::pair<int, int> gammaRange(const JetPolynomial& f, const JetPolynomial& g) {
        int lo = 0, hi = 0;
        bool first = true;
        for (const JetPolynomial* p : {&f, &g}) {
            for (const auto& [m, c] : p->terms()) {
                lo = first ? m.gammaExp : std::min(lo, m.gammaExp);
                hi = first ? m.gammaExp : std::max(hi, m.gammaExp);
                first = false;
            }
        }
        return {lo, hi};
    }

    // Candidates linear in one w-generator with a z-pure cofactor.
    static void appendWSector(std::vector<Monomial>& cand, int weight, int maxIdx, int gMin,
                              int gMax) {
        for (int k = 0; k <= weight; ++k) {
            for (const Monomial& m : basis::zPure(weight - k, maxIdx)) {
                for (int g = gMin; g <= gMax; ++g) {
                    Monomial n = m.times(Monomial::gen(wGen(k)));
                    n.gammaExp = g;
                    cand.push_back(std::move(n));
                }
            }
        }
    }

    static JetPolynomial assemble(const std::vector<Monomial>& cand,
                                  const std::vector<GaussQ>& coeffs) {
        JetPolynomial out;
        for (size_t i = 0; i < cand.size(); ++i) out.addTerm(cand[i], coeffs[i]);
        return out;
    }

    std::vector<JetPolynomial> nullspace(const std::vector<Monomial>& cand,
                                         const std::vector<JetPolynomial>& images) {
        std::map<Monomial, int, MonomialOrder> rowIndex;
        for (const auto& img : images)
            for (const auto& [m, c] : img.terms())
                rowIndex.try_emplace(m, static_cast<int>(rowIndex.size()));
        const int rows = static_cast<int>(rowIndex.size());
        const int cols = static_cast<int>(images.size());
        std::vector<std::vector<GaussQ>> a(rows, std::vector<GaussQ>(cols));
        for (int j = 0; j < cols; ++j)
            for (const auto& [m, c] : images[j].terms()) a[rowIndex.at(m)][j] = c;

        std::vector<int> pivotOfCol(cols, -1);
        int rank = 0;
        for (int col = 0; col < cols && rank < rows; ++col) {
            int pivot = -1;
            for (int r = rank; r < rows; ++r) {
                if (!a[r][col].isZero()) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) continue;
            std::swap(a[rank], a[pivot]);
            GaussQ inv = a[rank][col].inverse();
            for (int j = col; j < cols; ++j) a[rank][j] *= inv;
            for (int r = 0; r < rows; ++r) {
                if (r == rank || a[r][col].isZero()) continue;
                GaussQ f = a[r][col];
                for (int j = col; j < cols; ++j) a[r][j] -= f * a[rank][j];
            }
            pivotOfCol[col] = rank;
            ++rank;
        }
        std::vector<JetPolynomial> ker;
        for (int col = 0; col < cols; ++col) {
            if (pivotOfCol[col] >= 0) continue;
            JetPolynomial vec = JetPolynomial::monomial(cand[col]);
            for (int c2 = 0; c2 < col; ++c2) {
                if (pivotOfCol[c2] < 0) continue;
                GaussQ coef = a[pivotOfCol[c2]][col];
                if (!coef.isZero()) vec.addTerm(cand[c2], -coef);
            }
            ker.push_back(std::move(vec));
        }
        return ker;
    }
};

} // namespace cmckit
