#pragma once

#include "hierarchy.hpp"

namespace cmckit {

// f omega + g omegabar modulo the contact ideal, scaled by an exact
// prefactor. Closedness is the exact test dOmega(g) = dOmegaBar(f), valid
// because d(omega) and d(omegabar) vanish mod the ideal.
struct OneForm {
    JetPolynomial fOmega;
    JetPolynomial fOmegaBar;
    GaussQ prefactor = GaussQ(1);

    bool isZero() const { return fOmega.isZero() && fOmegaBar.isZero(); }

    friend bool operator==(const OneForm& x, const OneForm& y) {
        return x.fOmega.scaled(x.prefactor) == y.fOmega.scaled(y.prefactor) &&
               x.fOmegaBar.scaled(x.prefactor) == y.fOmegaBar.scaled(y.prefactor);
    }
};

// phi_n = -i (C^{2n+2} omega + r^{-1} B^{2n} omegabar), with B^0 := 0 so
// that phi_0 = i omega, the square root of the Hopf differential.
inline OneForm phi(int n, const Hierarchy& hier) {
    OneForm form;
    form.prefactor = -GaussQ::i();
    form.fOmega = hier.level(n).C;
    form.fOmegaBar = n == 0 ? JetPolynomial()
                            : hier.level(n - 1).B.shifted(0, -1);
    return form;
}

inline bool isClosed(const OneForm& form, Derivation& der) {
    return der.dOmega(form.fOmegaBar) == der.dOmegaBar(form.fOmega);
}

// Exactness at the polynomial level. A witness F has d F = form; Obstructed
// certifies a nontrivial cohomology class.
struct ExactnessResult {
    std::optional<JetPolynomial> witness;
    bool nonExact() const { return !witness.has_value(); }
};

inline ExactnessResult isExact(const OneForm& form, Derivation& der) {
    JetSolver solver(der);
    auto anti = solver.jointAntiderivative(form.fOmega, form.fOmegaBar);
    if (anti.obstructed()) return {};
    return {anti.witness->scaled(form.prefactor)};
}

// Poisson-bracket 1-form phi_{P,Q} = -P J dQ + Q J dP in the omega-frame,
// with the J-convention J omega = -i omega:
//   fOmega    = -i (-P dOmega(Q)    + Q dOmega(P)),
//   fOmegaBar = +i (-P dOmegaBar(Q) + Q dOmegaBar(P)).
inline OneForm poissonForm(const JetPolynomial& P, const JetPolynomial& Q, Derivation& der) {
    OneForm form;
    form.fOmega = (-GaussQ::i()) * (Q * der.dOmega(P) - P * der.dOmega(Q));
    form.fOmegaBar = GaussQ::i() * (Q * der.dOmegaBar(P) - P * der.dOmegaBar(Q));
    return form;
}

} // namespace cmckit
