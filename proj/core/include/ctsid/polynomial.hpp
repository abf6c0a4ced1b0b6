#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ctsid {

/**
 * Real polynomial with coefficients stored in ascending order of the
 * indeterminate: coeffs[k] multiplies p^k.  Used both for continuous-time
 * operator polynomials in p and as a building block for transfer functions.
 *
 * Trailing zero coefficients are trimmed on construction, so degree() is
 * always the true degree (-1 for the zero polynomial).
 */
class CtPolynomial {
public:
    CtPolynomial() = default;
    explicit CtPolynomial(std::vector<double> ascending_coeffs);

    // Builds the real polynomial leading * prod_k (x - roots[k]).  The root
    // set must be closed under conjugation within cluster_tol (relative);
    // repeated and conjugate roots are matched by clustering.
    static CtPolynomial from_roots(const std::vector<std::complex<double>>& roots,
                                   double leading = 1.0, double cluster_tol = 1e-8);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    // Coefficient of p^k; zero outside the stored range.
    double coeff(int k) const;
    const std::vector<double>& coeffs() const { return c_; }
    double leading_coeff() const;
    double constant_term() const { return coeff(0); }

    double operator()(double x) const;
    std::complex<double> operator()(const std::complex<double>& x) const;

    // Roots as eigenvalues of the monic companion matrix.
    std::vector<std::complex<double>> roots() const;

    CtPolynomial derivative() const;

    // Scales so that constant_term() == 1.  Throws if the constant term is
    // negligible relative to the coefficient norm.
    CtPolynomial normalized_constant_term() const;
    // Scales so that leading_coeff() == 1.
    CtPolynomial normalized_monic() const;

    CtPolynomial operator-() const;
    CtPolynomial& operator+=(const CtPolynomial& rhs);
    CtPolynomial& operator-=(const CtPolynomial& rhs);
    CtPolynomial& operator*=(double s);

    friend CtPolynomial operator+(CtPolynomial lhs, const CtPolynomial& rhs) { return lhs += rhs; }
    friend CtPolynomial operator-(CtPolynomial lhs, const CtPolynomial& rhs) { return lhs -= rhs; }
    friend CtPolynomial operator*(const CtPolynomial& lhs, const CtPolynomial& rhs);
    friend CtPolynomial operator*(CtPolynomial lhs, double s) { return lhs *= s; }
    friend CtPolynomial operator*(double s, CtPolynomial rhs) { return rhs *= s; }

    bool operator==(const CtPolynomial& rhs) const { return c_ == rhs.c_; }

    std::string to_string(const std::string& var = "p") const;

private:
    void trim();

    std::vector<double> c_;
};

}  // namespace ctsid
