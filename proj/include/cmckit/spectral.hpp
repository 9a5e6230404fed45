#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <vector>

#include "finitetype.hpp"

namespace cmckit {

// Complex arithmetic on GMP floats for the root-polishing iteration.
struct BigComplex {
    mpf_class re, im;
    explicit BigComplex(int prec = 256) : re(0, prec), im(0, prec) {}
    BigComplex(const mpf_class& r, const mpf_class& i) : re(r), im(i) {}

    static BigComplex from(const std::complex<double>& z, int prec) {
        return {mpf_class(z.real(), prec), mpf_class(z.imag(), prec)};
    }
    static BigComplex from(const GaussQ& q, int prec) {
        return {mpf_class(q.re, prec), mpf_class(q.im, prec)};
    }
    std::complex<double> toDouble() const { return {re.get_d(), im.get_d()}; }

    BigComplex operator+(const BigComplex& o) const { return {re + o.re, im + o.im}; }
    BigComplex operator-(const BigComplex& o) const { return {re - o.re, im - o.im}; }
    BigComplex operator*(const BigComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    BigComplex operator/(const BigComplex& o) const {
        mpf_class n = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
    }
    mpf_class absSq() const { return re * re + im * im; }
};

// Roots of an exact-coefficient polynomial: companion-matrix eigenvalues
// seed a Newton iteration carried out in extended precision.
inline std::vector<std::complex<double>> polynomialRoots(const std::vector<GaussQ>& coeffs,
                                                         int precBits = 256) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && coeffs[deg].isZero()) --deg;
    if (deg <= 0) return {};

    using Cd = std::complex<double>;
    auto cd = [](const GaussQ& q) { return Cd(q.re.get_d(), q.im.get_d()); };
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    Cd lead = cd(coeffs[deg]);
    for (int i = 0; i < deg; ++i) {
        comp(i, deg - 1) = -cd(coeffs[i]) / lead;
        if (i > 0) comp(i, i - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

    std::vector<BigComplex> cf, dcf;
    for (int i = 0; i <= deg; ++i) cf.push_back(BigComplex::from(coeffs[i], precBits));
    for (int i = 1; i <= deg; ++i) {
        BigComplex d = cf[i];
        d.re *= i;
        d.im *= i;
        dcf.push_back(d);
    }
    auto horner = [](const std::vector<BigComplex>& c, const BigComplex& x) {
        BigComplex acc = c.back();
        for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) acc = acc * x + c[i];
        return acc;
    };

    std::vector<std::complex<double>> roots;
    for (int i = 0; i < deg; ++i) {
        BigComplex x = BigComplex::from(es.eigenvalues()(i), precBits);
        for (int it = 0; it < 64; ++it) {
            BigComplex f = horner(cf, x);
            BigComplex df = horner(dcf, x);
            if (df.absSq() == 0) break;
            BigComplex step = f / df;
            x = x - step;
            if (step.absSq() < mpf_class(1e-60, precBits)) break;
        }
        roots.push_back(x.toDouble());
    }
    std::sort(roots.begin(), roots.end(), [](const Cd& a, const Cd& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

struct SpectralReport {
    std::vector<GaussQ> P;          // exact coefficients, degree 4m-4
    int degree = 0;
    GaussQ P0, Ptop;
    std::vector<std::complex<double>> roots;
    int oddRootPairs = 0;           // ell: odd-multiplicity pairs off the unit circle
    int genusArithmetic = 0;        // 2m-2
    int genusGeometric = 0;         // ell
    bool rootsUnitCircleSymmetric = false;
    double pairingTolerance = 1e-10;
};

// |root multiset invariant under l -> 1/conj(l)| within the tolerance.
inline bool rootsSymmetricUnderInversion(const std::vector<std::complex<double>>& roots,
                                         double tol) {
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        std::complex<double> target = 1.0 / std::conj(roots[i]);
        bool found = false;
        for (size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(roots[j] - target) < tol * std::max(1.0, std::abs(target))) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

inline SpectralReport spectralPolynomial(const LambdaMatrix& X, const FiniteTypeState& state,
                                         const FiniteTypeSpec& spec, double pairingTol = 1e-10) {
    SpectralReport rep;
    rep.pairingTolerance = pairingTol;
    LambdaPoly sym = X.spectralPoly();
    for (const auto& coeff : sym) rep.P.push_back(state.evaluate(coeff));
    rep.degree = 4 * X.m - 4;
    if (static_cast<int>(rep.P.size()) != rep.degree + 1)
        throw std::logic_error("spectral polynomial has unexpected degree bound");
    if (rep.P[rep.degree].isZero()) throw DegenerateState("leading coefficient vanishes");
    rep.P0 = rep.P[0];
    rep.Ptop = rep.P[rep.degree];

    GaussQ vTop = spec.m >= 2 ? spec.V[spec.m - 2] : GaussQ(1);
    if (rep.P0 != GaussQ(-4) * state.gamma)
        throw std::logic_error("P_0 != -4 gamma");
    if (rep.Ptop != GaussQ(-4) * state.gamma * vTop * vTop)
        throw std::logic_error("P_top != -4 gamma V_{m-1}^2");

    rep.roots = polynomialRoots(rep.P);
    rep.rootsUnitCircleSymmetric = rootsSymmetricUnderInversion(rep.roots, pairingTol);
    rep.genusArithmetic = 2 * X.m - 2;

    // Cluster roots into multiplicity groups, then count odd-multiplicity
    // pairs strictly off the unit circle.
    std::vector<bool> seen(rep.roots.size(), false);
    std::vector<std::pair<std::complex<double>, int>> clusters;
    for (size_t i = 0; i < rep.roots.size(); ++i) {
        if (seen[i]) continue;
        int mult = 1;
        seen[i] = true;
        for (size_t j = i + 1; j < rep.roots.size(); ++j) {
            if (!seen[j] && std::abs(rep.roots[j] - rep.roots[i]) < 1e-7) {
                seen[j] = true;
                ++mult;
            }
        }
        clusters.emplace_back(rep.roots[i], mult);
    }
    int oddOffCircle = 0;
    for (const auto& [root, mult] : clusters)
        if (mult % 2 == 1 && std::abs(std::abs(root) - 1.0) > pairingTol) ++oddOffCircle;
    rep.oddRootPairs = oddOffCircle / 2;
    rep.genusGeometric = rep.oddRootPairs;
    return rep;
}

// Numeric first-integral run for the level-2 closed system: straight path
// in the surface coordinate (direction e^{i theta} in the omega-frame),
// classical 4th-order stepping, drift of P(lambda) at the sample points and
// of the transversal constraint.
struct PathReport {
    double maxDriftP = 0;
    double maxConstraintResidual = 0;
    int steps = 0;
};

class Level2Flow {
  public:
    Level2Flow(const FiniteTypeSpec& spec, double gammaSq, double theta)
        : U1_(spec.U[0].re.get_d(), spec.U[0].im.get_d()),
          V1_(spec.V[0].re.get_d(), spec.V[0].im.get_d()),
          dir_(std::cos(theta), std::sin(theta)) {
        if (spec.m != 2) throw std::invalid_argument("Level2Flow needs m = 2");
        if (!(gammaSq > 0))
            throw ConstantsNotAdapted("gamma^2 > 0 is required for linear finite type");
        gamma_ = std::sqrt(gammaSq);
    }

    struct State {
        double r;
        std::complex<double> z3, z4;
    };

    std::complex<double> z5(const State& s) const {
        return 5.0 * s.z3 * s.z4 - (35.0 / 8.0) * s.z3 * s.z3 * s.z3 -
               gamma_ * (U1_ * s.z3 + V1_ * std::conj(s.z3));
    }

    State derivative(const State& s) const {
        if (!(std::abs(s.r) > 1e-12)) throw StepFailure("r -> 0 during integration");
        std::complex<double> cdir = std::conj(dir_);
        double g2 = gamma_ * gamma_;
        State d;
        d.r = s.r * (dir_ * s.z3 + cdir * std::conj(s.z3)).real() / 2.0;
        d.z3 = dir_ * (s.z4 - 1.5 * s.z3 * s.z3) + cdir * (g2 - s.r * s.r) / s.r;
        d.z4 = dir_ * (z5(s) - 2.0 * s.z3 * s.z4) +
               cdir * (2.5 * g2 - 3.5 * s.r * s.r) * s.z3 / s.r;
        return d;
    }

    State rk4(const State& s, double h) const {
        auto add = [](const State& a, const State& b, double f) {
            return State{a.r + f * b.r, a.z3 + f * b.z3, a.z4 + f * b.z4};
        };
        State k1 = derivative(s);
        State k2 = derivative(add(s, k1, h / 2));
        State k3 = derivative(add(s, k2, h / 2));
        State k4 = derivative(add(s, k3, h));
        State out = s;
        out.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
        out.z3 += h / 6.0 * (k1.z3 + 2.0 * k2.z3 + 2.0 * k3.z3 + k4.z3);
        out.z4 += h / 6.0 * (k1.z4 + 2.0 * k2.z4 + 2.0 * k3.z4 + k4.z4);
        return out;
    }

    // Residual of the transversal relation
    //   C4 + U1 - V1 r^{-1} conj(B4) + g V1 conj(U1) r^{-1} = 0.
    double constraintResidual(const State& s) const {
        std::complex<double> C4 = (s.z4 - 1.75 * s.z3 * s.z3) / (2.0 * gamma_);
        std::complex<double> B4 = 0.5 * (s.z4 - 1.25 * s.z3 * s.z3);
        return std::abs(C4 + U1_ - V1_ * std::conj(B4) / s.r +
                        gamma_ * V1_ * std::conj(U1_) / s.r);
    }

    // P(lambda) evaluated numerically from the jet-polynomial coefficients.
    std::complex<double> evalP(const LambdaPoly& P, const State& s,
                               std::complex<double> lambda) const {
        std::complex<double> acc = 0;
        std::complex<double> z5v = z5(s);
        for (int i = static_cast<int>(P.size()) - 1; i >= 0; --i)
            acc = acc * lambda + evalJet(P[i], s, z5v);
        return acc;
    }

    std::complex<double> evalJet(const JetPolynomial& p, const State& s,
                                 std::complex<double> z5v) const {
        auto genVal = [&](const Generator& g) -> std::complex<double> {
            std::complex<double> v;
            switch (g.index) {
                case 3: v = s.z3; break;
                case 4: v = s.z4; break;
                case 5: v = z5v; break;
                default: throw std::logic_error("state covers z3..z5 only");
            }
            return g.kind == GenKind::Z ? v : std::conj(v);
        };
        std::complex<double> total = 0;
        for (const auto& [m, c] : p.terms()) {
            std::complex<double> term(c.re.get_d(), c.im.get_d());
            term *= std::pow(gamma_, m.gammaExp);
            term *= std::pow(s.r, m.rExp);
            for (const auto& [g, e] : m.exps) term *= std::pow(genVal(g), e);
            total += term;
        }
        return total;
    }

    PathReport integrate(const LambdaMatrix& X, State s, double length, double h,
                         const std::vector<std::complex<double>>& lambdaSamples) const {
        LambdaPoly P = X.spectralPoly();
        std::vector<std::complex<double>> p0;
        for (const auto& l : lambdaSamples) p0.push_back(evalP(P, s, l));
        PathReport rep;
        int n = static_cast<int>(std::llround(length / h));
        for (int i = 0; i < n; ++i) {
            s = rk4(s, h);
            ++rep.steps;
            rep.maxConstraintResidual = std::max(rep.maxConstraintResidual, constraintResidual(s));
        }
        for (size_t k = 0; k < lambdaSamples.size(); ++k)
            rep.maxDriftP = std::max(rep.maxDriftP, std::abs(evalP(P, s, lambdaSamples[k]) - p0[k]));
        return rep;
    }

  private:
    std::complex<double> U1_, V1_;
    double gamma_;
    std::complex<double> dir_;
};

inline std::vector<std::complex<double>> defaultLambdaSamples() {
    return {{0.5, 0.0}, {-0.4, 0.0},  {1.0, 0.5},  {-0.7, 0.3},
            {0.2, -0.9}, {1.5, -0.2}, {-1.1, -0.6}, {0.8, 0.8}};
}

} // namespace cmckit
