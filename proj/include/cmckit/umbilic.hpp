#pragma once

#include <random>

#include "bilaurent.hpp"
#include "hierarchy.hpp"

namespace cmckit {

struct EpsilonDependent : std::runtime_error {
    explicit EpsilonDependent(const std::string& what) : std::runtime_error(what) {}
};

// Local model of a CMC surface centered at an umbilic of degree p:
//   xi = e^u dz, eta_1 = e^{-u} z^p dz, Hopf = z^p (dz)^2, z = w^2.
// The conformal factor u is stored as an exact Hermitian Taylor jet with
// c_00 = 0 (so e^{ku} stays rational); the interior coefficients are
// completed from the compatibility equation
//   u_{z zbar} = -1/4 (g^2 e^{2u} - |z|^{2p} e^{-2u}),
// the boundary jet c_{i0} = conj(c_{0i}) being the free data.
class UmbilicModel {
  public:
    UmbilicModel(int p, int truncation, mpq_class gammaValue,
                 const std::vector<GaussQ>& boundaryJet)
        : p_(p), M_(truncation), gamma_(std::move(gammaValue)) {
        if (p < 0) throw std::invalid_argument("umbilic degree p must be >= 0");
        for (size_t i = 0; i < boundaryJet.size(); ++i) {
            setJet(static_cast<int>(i) + 1, 0, boundaryJet[i]);
            setJet(0, static_cast<int>(i) + 1, boundaryJet[i].conj());
        }
        completeInterior();
    }

    static UmbilicModel random(int p, int truncation, mpq_class gammaValue, uint64_t seed,
                               int jetDepth = 3) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> num(-4, 4);
        std::uniform_int_distribution<int> den(1, 3);
        std::vector<GaussQ> jet;
        for (int i = 0; i < jetDepth; ++i) {
            mpq_class re(num(rng), den(rng)), im(num(rng), den(rng));
            jet.emplace_back(re, im);
        }
        return UmbilicModel(p, truncation, std::move(gammaValue), jet);
    }

    int p() const { return p_; }
    int truncation() const { return M_; }
    const mpq_class& gammaValue() const { return gamma_; }
    GaussQ uCoefficient(int i, int j) const {
        auto it = uJet_.find({i, j});
        return it == uJet_.end() ? GaussQ() : it->second;
    }

    // u as a series in (w, wbar): z^i zbar^j = w^{2i} wbar^{2j}.
    BiLaurent uSeries() const {
        BiLaurent u(M_);
        for (const auto& [k, c] : uJet_) u.add(2 * k.first, 2 * k.second, c);
        return u;
    }

  private:
    int p_;
    int M_; // certified total degree in w
    mpq_class gamma_;
    std::map<std::pair<int, int>, GaussQ> uJet_; // z-coordinates

    void setJet(int i, int j, const GaussQ& c) {
        if (c.isZero()) return;
        uJet_[{i, j}] = c;
    }

    // Order-by-order triangular solve of the compatibility equation; the
    // degree-(i-1, j-1) coefficient of the right side only involves u-jets
    // of strictly lower total degree.
    void completeInterior() {
        int zDeg = M_ / 2 + 1;
        GaussQ g2 = GaussQ(gamma_ * gamma_);
        for (int d = 2; d <= zDeg; ++d) {
            // Degree-d interior jets only need the exponentials through
            // degree d-2 (z-representation).
            BiLaurent u(d - 2);
            for (const auto& [k, c] : uJet_)
                if (k.first + k.second < d) u.add(k.first, k.second, c);
            BiLaurent e2u = BiLaurent::exp(u.scaled(GaussQ(2)));
            BiLaurent em2u = BiLaurent::exp(u.scaled(GaussQ(-2)));
            for (int i = 1; i < d; ++i) {
                int j = d - i;
                if (j < 1) continue;
                GaussQ rhs = GaussQ(-1, 4) * (g2 * e2u.coefficient(i - 1, j - 1));
                if (i - 1 >= p_ && j - 1 >= p_)
                    rhs += GaussQ(1, 4) * em2u.coefficient(i - 1 - p_, j - 1 - p_);
                setJet(i, j, rhs / GaussQ(static_cast<long>(i) * j));
            }
        }
    }

    friend class SurfaceJets;
};

// The prolonged jets of the local model: h_2 = e^{-2u} z^p, the lift
// h_{j+1} = e^{-u} (d_z h_j - j u_z h_j), and z_j = h_j h_2^{-j/2}.
class SurfaceJets {
  public:
    SurfaceJets(const UmbilicModel& model, int maxJ) : model_(model) {
        BiLaurent u = model.uSeries();
        u1_ = u.dz();
        expU_[0] = BiLaurent::constant(GaussQ(1), model.truncation());
        expU_[1] = BiLaurent::exp(u);
        expU_[-1] = BiLaurent::exp(-u);

        h_[2] = expU(-2).shifted(2 * model.p(), 0);
        for (int j = 2; j < maxJ; ++j)
            h_[j + 1] = expU(-1) * (h_[j].dz() - (u1_ * h_[j]).scaled(GaussQ(j)));
        for (int j = 3; j <= maxJ; ++j) z_[j] = h_[j] * expU(j).shifted(-j * model.p(), 0);
    }

    const BiLaurent& h(int j) const { return h_.at(j); }
    const BiLaurent& z(int j) const { return z_.at(j); }
    BiLaurent zBar(int j) const { return z_.at(j).conj(); }
    const BiLaurent& uz() const { return u1_; }

    // e^{ku}, built incrementally from e^{+-u}.
    const BiLaurent& expU(int k) const {
        auto it = expU_.find(k);
        if (it != expU_.end()) return it->second;
        int step = k > 0 ? 1 : -1;
        const BiLaurent& prev = expU(k - step);
        return expU_.emplace(k, prev * expU_.at(step)).first->second;
    }

    // r^e = (e^{-2u} w^p wbar^p)^e
    BiLaurent rPow(int e) const {
        return expU(-2 * e).shifted(e * model_.p(), e * model_.p());
    }
    BiLaurent gammaPow(int e) const {
        mpq_class g = model_.gammaValue();
        mpq_class val(1);
        for (int i = 0; i < std::abs(e); ++i) val *= g;
        if (e < 0) val = 1 / val;
        return BiLaurent::constant(GaussQ(val), model_.truncation());
    }

    // Evaluate a z-pure jet polynomial (gamma/r Laurent allowed) on the jets.
    BiLaurent substitute(const JetPolynomial& poly) const {
        std::map<std::pair<Generator, int>, BiLaurent> powers;
        auto genPow = [&](const Generator& g, int e) -> const BiLaurent& {
            for (int k = 1; k <= e; ++k) {
                auto key = std::pair<Generator, int>{g, k};
                if (powers.count(key)) continue;
                if (k == 1) {
                    powers.emplace(key, g.kind == GenKind::Z ? z(g.index) : zBar(g.index));
                } else {
                    BiLaurent val = powers.at({g, k - 1}) * powers.at({g, 1});
                    powers.emplace(key, std::move(val));
                }
            }
            return powers.at({g, e});
        };
        BiLaurent out(model_.truncation());
        bool first = true;
        for (const auto& [m, c] : poly.terms()) {
            BiLaurent term = gammaPow(m.gammaExp).scaled(c);
            if (m.rExp != 0) term = term * rPow(m.rExp);
            for (const auto& [g, e] : m.exps) {
                if (g.kind != GenKind::Z && g.kind != GenKind::ZBar)
                    throw std::invalid_argument("substitute: only z-sector polynomials");
                term = term * genPow(g, e);
            }
            out = first ? term : out + term;
            first = false;
        }
        return out;
    }

  private:
    const UmbilicModel& model_;
    BiLaurent u1_{0};
    std::map<int, BiLaurent> h_;
    std::map<int, BiLaurent> z_;
    mutable std::map<int, BiLaurent> expU_;
};

// A 1-form expanded at the umbilic: (dwPart) dw + (dwBarPart) dwbar.
struct UmbilicExpansion {
    BiLaurent dwPart{0};
    BiLaurent dwBarPart{0};
};

// phi_n = -i (C^{2n+2} omega + r^{-1} B^{2n} omegabar) with omega = 2 w^{p+1} dw.
inline UmbilicExpansion expandPhi(int n, const UmbilicModel& model, const SurfaceJets& jets,
                                  const Hierarchy& hier) {
    UmbilicExpansion out;
    GaussQ m2i = GaussQ(-2) * GaussQ::i();
    out.dwPart = jets.substitute(hier.level(n).C).shifted(model.p() + 1, 0).scaled(m2i);
    if (n == 0) {
        out.dwBarPart = BiLaurent(model.truncation());
    } else {
        BiLaurent b = jets.substitute(hier.level(n - 1).B) * jets.rPow(-1);
        out.dwBarPart = b.shifted(0, model.p() + 1).scaled(m2i);
    }
    return out;
}

// Circle integral (1/2 pi i) \oint_{|w|=eps}: a monomial w^a wbar^b dw
// contributes at eps^{a+b+1} iff b = a+1 and w^a wbar^b dwbar contributes
// with the opposite sign iff a = b+1. All contributions at nonzero
// eps-exponent must cancel; the eps-free part is the residue.
inline GaussQ residue(const UmbilicExpansion& phi) {
    // A cancellation between the dw and dwbar contributions can only be
    // asserted where both parts are certified.
    int certified = std::min(phi.dwPart.truncation(), phi.dwBarPart.truncation());
    if (certified < -1)
        throw TruncationInsufficient("residue: series not certified through degree -1");
    std::map<int, GaussQ> byEps;
    for (const auto& [k, c] : phi.dwPart.terms())
        if (k.second == k.first + 1 && k.first + k.second <= certified)
            byEps[k.first + k.second + 1] += c;
    for (const auto& [k, c] : phi.dwBarPart.terms())
        if (k.first == k.second + 1 && k.first + k.second <= certified)
            byEps[k.first + k.second + 1] -= c;
    GaussQ res;
    for (const auto& [eps, c] : byEps) {
        if (eps == 0) {
            res = c;
        } else if (!c.isZero()) {
            throw EpsilonDependent("residue depends on the circle radius at eps-exponent " +
                                   std::to_string(eps));
        }
    }
    return res;
}

// Series-level closedness through the jointly certified degree.
inline bool seriesClosed(const UmbilicExpansion& phi) {
    BiLaurent lhs = phi.dwPart.dwBar();
    BiLaurent rhs = phi.dwBarPart.dw();
    BiLaurent diff = lhs - rhs;
    int certified = std::min(lhs.truncation(), rhs.truncation());
    for (const auto& [k, c] : diff.terms())
        if (k.first + k.second <= certified && !c.isZero()) return false;
    return true;
}

// Independent evaluation of the displayed closed form of phi_1:
//   (i/w^p) [ (3p^2+4p - 16 p u1 w^2 + 16 (u2+u1^2) w^4) / (4 g w^3) dw
//             - 2 g e^{2u} wbar dwbar ].
inline UmbilicExpansion phi1ClosedForm(const UmbilicModel& model, const SurfaceJets& jets) {
    int p = model.p();
    GaussQ g(model.gammaValue());
    const BiLaurent& u1 = jets.uz();
    BiLaurent u2 = u1.dz();
    int M = model.truncation();

    BiLaurent numerator = BiLaurent::constant(GaussQ(3 * p * p + 4 * p), M) +
                          u1.shifted(2, 0).scaled(GaussQ(-16 * p)) +
                          (u2 + u1 * u1).shifted(4, 0).scaled(GaussQ(16));
    UmbilicExpansion out;
    out.dwPart = numerator.shifted(-p - 3, 0).scaled(GaussQ::i() * GaussQ(1, 4) * g.inverse());
    out.dwBarPart =
        jets.expU(2).shifted(-p, 1).scaled(GaussQ(-2) * GaussQ::i() * g);
    return out;
}

// Total-degree pole bounds of the normal forms at an umbilic of degree p.
inline int poleBoundLowerB(int n, int p) { return -((2 * n - 1) * p + (4 * n - 4)); }
inline int poleBoundLowerC(int n, int p) { return -((2 * n - 3) * p + (4 * n - 4)); }
inline int poleBoundLowerA(int n, int p) { return -((2 * n - 1) * p + (4 * n - 2)); }
inline int poleBoundPhiDw(int n, int p) { return -((2 * n - 1) * p + (4 * n - 1)); }
inline int poleBoundPhiDwBar(int n, int p) { return -((2 * n - 1) * p + (4 * n - 4)) + 1; }

} // namespace cmckit
