#include "ctsid/stability.hpp"

#include <cmath>

namespace ctsid {

StabilityReport stability_check(const CtPolynomial& den, Domain domain, double boundary_tol) {
    StabilityReport rep;
    if (den.degree() <= 0) {
        rep.stable = true;
        rep.trivial = true;
        return rep;
    }
    rep.stable = true;
    for (const auto& r : den.roots()) {
        const double margin = (domain == Domain::continuous) ? -r.real() : 1.0 - std::abs(r);
        if (margin <= boundary_tol) {
            rep.unstable_roots.push_back(r);
            if (std::abs(margin) <= boundary_tol) rep.marginal = true;
            rep.stable = false;
        }
    }
    return rep;
}

StabilityReport stability_check(const CtTransferFunction& g) {
    return stability_check(g.den(), Domain::continuous);
}

StabilityReport stability_check(const DtTransferFunction& g) {
    std::vector<double> ascending(g.den().rbegin(), g.den().rend());
    return stability_check(CtPolynomial(std::move(ascending)), Domain::discrete);
}

CtPolynomial reflect_unstable_roots(const CtPolynomial& den, Domain domain) {
    if (den.degree() <= 0) return den;
    auto roots = den.roots();
    for (auto& r : roots) {
        if (domain == Domain::continuous) {
            if (r.real() > 0.0) r = std::complex<double>(-r.real(), r.imag());
        } else {
            const double mag = std::abs(r);
            if (mag > 1.0) r /= mag * mag;
        }
    }
    return CtPolynomial::from_roots(roots, den.leading_coeff());
}

}  // namespace ctsid
