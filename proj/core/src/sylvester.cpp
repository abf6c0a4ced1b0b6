#include "ctsid/sylvester.hpp"

#include <stdexcept>

namespace ctsid {

Eigen::MatrixXd build_sylvester(const CtPolynomial& p1, const CtPolynomial& p2, int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("block sizes must be non-negative");
    if (p1.degree() > m) {
        throw std::invalid_argument("degree overflow: first polynomial exceeds degree m");
    }
    if (p2.degree() > n) {
        throw std::invalid_argument("degree overflow: second polynomial exceeds degree n");
    }
    const int size = n + m + 1;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
    // Column j holds the coefficient of p^{n+m-j}; p^shift * poly puts
    // coeff(k) of poly at power k + shift.
    auto fill_row = [&](int row, const CtPolynomial& poly, int shift) {
        for (int k = 0; k <= poly.degree(); ++k) {
            const int power = k + shift;
            s(row, n + m - power) = poly.coeff(k);
        }
    };
    for (int i = 0; i < n; ++i) fill_row(i, p1, i + 1);
    for (int j = 0; j <= m; ++j) fill_row(n + j, p2, j);
    return s;
}

}  // namespace ctsid
