#pragma once

#include "ctsid/polynomial.hpp"

#include <Eigen/Dense>

namespace ctsid {

/**
 * Structured resultant matrix of size (n+m+1) x (n+m+1) for polynomials
 * p1 (degree <= m) and p2 (degree <= n).  Row i (0-based, i < n) holds the
 * coefficients of p^{i+1} * p1 and row n+j holds those of p^j * p2, both in
 * the descending monomial basis [p^{n+m}, ..., p, 1].
 *
 * This is the coefficient map that factors an instrument filter bank
 * [-p B/A^2, ..., -p^n B/A^2, 1/A, ..., p^m/A]^T into S(-B, A) acting on a
 * common filter: call with p1 = -B, p2 = A.
 *
 * For full degrees (deg p1 = m, deg p2 = n) the determinant satisfies
 *   det S = sign * p2(0) * Res(p1, p2),
 *   sign  = (-1)^{m + n(n-1)/2 + m(m-1)/2},
 * so S is singular exactly when p1 and p2 share a root or p2(0) = 0.
 */
Eigen::MatrixXd build_sylvester(const CtPolynomial& p1, const CtPolynomial& p2, int n, int m);

}  // namespace ctsid
