#pragma once

#include "ctsid/polynomial.hpp"
#include "ctsid/transfer_function.hpp"

#include <complex>
#include <vector>

namespace ctsid {

enum class Domain { continuous, discrete };

struct StabilityReport {
    bool stable = false;    // all roots strictly inside the stable region
    bool marginal = false;  // at least one root on the boundary within tol
    bool trivial = false;   // degree zero: nothing to check
    std::vector<std::complex<double>> unstable_roots;  // boundary roots included
};

StabilityReport stability_check(const CtPolynomial& den, Domain domain, double boundary_tol = 1e-9);
StabilityReport stability_check(const CtTransferFunction& g);
StabilityReport stability_check(const DtTransferFunction& g);

// Projects a denominator into the stable region by reflecting offending
// roots: Re r > 0 becomes -Re r (continuous), |z| > 1 becomes 1/conj(z)
// (discrete).  Boundary roots are left in place.  The leading coefficient
// is preserved.
CtPolynomial reflect_unstable_roots(const CtPolynomial& den, Domain domain);

}  // namespace ctsid
