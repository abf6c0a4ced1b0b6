#include "ctsid/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctsid {

namespace {

double coeff_norm(const std::vector<double>& c) {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

CtPolynomial::CtPolynomial(std::vector<double> ascending_coeffs) : c_(std::move(ascending_coeffs)) {
    for (double x : c_) {
        if (!std::isfinite(x)) throw std::invalid_argument("polynomial coefficient is not finite");
    }
    trim();
}

void CtPolynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double CtPolynomial::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
    return c_[static_cast<size_t>(k)];
}

double CtPolynomial::leading_coeff() const {
    if (c_.empty()) return 0.0;
    return c_.back();
}

double CtPolynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::complex<double> CtPolynomial::operator()(const std::complex<double>& x) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<std::complex<double>> CtPolynomial::roots() const {
    const int n = degree();
    if (n <= 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    const double lead = c_.back();
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[static_cast<size_t>(i)] / lead;
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration failed on companion matrix");
    std::vector<std::complex<double>> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

CtPolynomial CtPolynomial::from_roots(const std::vector<std::complex<double>>& roots,
                                      double leading, double cluster_tol) {
    // Multiply factors in complex arithmetic, then check the imaginary
    // residue.  Conjugate symmetry within cluster_tol keeps the result real.
    std::vector<std::complex<double>> acc{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
        for (size_t i = 0; i < acc.size(); ++i) {
            next[i] += acc[i] * (-r);
            next[i + 1] += acc[i];
        }
        acc = std::move(next);
    }
    double scale = 0.0;
    for (const auto& z : acc) scale = std::max(scale, std::abs(z));
    std::vector<double> real_coeffs(acc.size());
    for (size_t i = 0; i < acc.size(); ++i) {
        if (std::abs(acc[i].imag()) > cluster_tol * (1.0 + scale)) {
            throw std::invalid_argument("root set is not conjugate-symmetric within tolerance");
        }
        real_coeffs[i] = acc[i].real() * leading;
    }
    return CtPolynomial(std::move(real_coeffs));
}

CtPolynomial CtPolynomial::derivative() const {
    if (c_.size() <= 1) return CtPolynomial{};
    std::vector<double> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return CtPolynomial(std::move(d));
}

CtPolynomial CtPolynomial::normalized_constant_term() const {
    const double c0 = constant_term();
    if (std::abs(c0) <= 1e-14 * (1.0 + coeff_norm(c_))) {
        throw std::invalid_argument("cannot normalize constant term: polynomial vanishes at zero");
    }
    CtPolynomial out = *this;
    for (double& x : out.c_) x /= c0;
    return out;
}

CtPolynomial CtPolynomial::normalized_monic() const {
    if (c_.empty()) throw std::invalid_argument("cannot normalize the zero polynomial");
    CtPolynomial out = *this;
    const double lead = c_.back();
    for (double& x : out.c_) x /= lead;
    return out;
}

CtPolynomial CtPolynomial::operator-() const {
    CtPolynomial out = *this;
    for (double& x : out.c_) x = -x;
    return out;
}

CtPolynomial& CtPolynomial::operator+=(const CtPolynomial& rhs) {
    if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), 0.0);
    for (size_t i = 0; i < rhs.c_.size(); ++i) c_[i] += rhs.c_[i];
    trim();
    return *this;
}

CtPolynomial& CtPolynomial::operator-=(const CtPolynomial& rhs) {
    if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), 0.0);
    for (size_t i = 0; i < rhs.c_.size(); ++i) c_[i] -= rhs.c_[i];
    trim();
    return *this;
}

CtPolynomial& CtPolynomial::operator*=(double s) {
    for (double& x : c_) x *= s;
    trim();
    return *this;
}

CtPolynomial operator*(const CtPolynomial& lhs, const CtPolynomial& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return CtPolynomial{};
    std::vector<double> prod(lhs.c_.size() + rhs.c_.size() - 1, 0.0);
    for (size_t i = 0; i < lhs.c_.size(); ++i) {
        for (size_t j = 0; j < rhs.c_.size(); ++j) prod[i + j] += lhs.c_[i] * rhs.c_[j];
    }
    return CtPolynomial(std::move(prod));
}

std::string CtPolynomial::to_string(const std::string& var) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const double a = coeff(k);
        if (a == 0.0) continue;
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        first = false;
        const double mag = std::abs(a);
        if (mag != 1.0 || k == 0) os << mag;
        if (k > 0) {
            if (mag != 1.0) os << "*";
            os << var;
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

}  // namespace ctsid
