#include "ctsid/linear_system.hpp"

#include <cmath>
#include <stdexcept>

namespace ctsid {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                                 Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols()) throw std::invalid_argument("state matrix must be square");
    if (B.rows() != A.rows()) throw std::invalid_argument("input matrix row count must match state order");
    if (C.cols() != A.cols()) throw std::invalid_argument("output matrix column count must match state order");
    if (D.rows() != C.rows() || D.cols() != B.cols()) {
        throw std::invalid_argument("feedthrough dimensions must match outputs x inputs");
    }
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix exponential requires a square matrix");
    const long n = a.rows();
    if (n == 0) return Eigen::MatrixXd(0, 0);

    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    }
    const Eigen::MatrixXd as = a / std::pow(2.0, squarings);

    const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd a2 = as * as;
    const Eigen::MatrixXd a4 = a2 * a2;
    const Eigen::MatrixXd a6 = a2 * a4;

    const Eigen::MatrixXd u =
        as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
              b[1] * ident);
    const Eigen::MatrixXd v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
        b[0] * ident;

    Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

namespace {

// Controllable canonical form for ascending num/den coefficient vectors.
// The denominator need not be monic; both are scaled internally.
StateSpaceModel realize_ascending(std::vector<double> num, std::vector<double> den) {
    const int n = static_cast<int>(den.size()) - 1;
    if (n < 0 || den.back() == 0.0) throw std::invalid_argument("invalid denominator");
    if (static_cast<int>(num.size()) - 1 > n) throw std::invalid_argument("improper transfer function");

    num.resize(static_cast<size_t>(n) + 1, 0.0);
    const double lead = den.back();
    for (double& x : num) x /= lead;
    for (double& x : den) x /= lead;

    const double d = num[static_cast<size_t>(n)];
    // Strictly proper remainder after splitting off the feedthrough.
    std::vector<double> rem(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) rem[static_cast<size_t>(i)] = num[static_cast<size_t>(i)] - d * den[static_cast<size_t>(i)];

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd bvec = Eigen::MatrixXd::Zero(n, 1);
    Eigen::MatrixXd cvec = Eigen::MatrixXd::Zero(1, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) a(n - 1, i) = -den[static_cast<size_t>(i)];
    if (n > 0) bvec(n - 1, 0) = 1.0;
    for (int i = 0; i < n; ++i) cvec(0, i) = rem[static_cast<size_t>(i)];
    Eigen::MatrixXd dmat(1, 1);
    dmat(0, 0) = d;
    return StateSpaceModel(std::move(a), std::move(bvec), std::move(cvec), std::move(dmat));
}

}  // namespace

StateSpaceModel realize_ct(const CtTransferFunction& g) {
    return realize_ascending(g.num().coeffs(), g.den().coeffs());
}

StateSpaceModel realize_dt(const DtTransferFunction& g) {
    std::vector<double> num(g.num().rbegin(), g.num().rend());
    std::vector<double> den(g.den().rbegin(), g.den().rend());
    return realize_ascending(std::move(num), std::move(den));
}

std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("characteristic polynomial requires a square matrix");
    const int n = static_cast<int>(a.rows());
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    c[0] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        const Eigen::MatrixXd am = a * m;
        c[static_cast<size_t>(k)] = -am.trace() / static_cast<double>(k);
        m = am + c[static_cast<size_t>(k)] * Eigen::MatrixXd::Identity(n, n);
    }
    return c;
}

DtTransferFunction ss_to_dt_tf(const StateSpaceModel& ss, double h) {
    if (ss.n_inputs() != 1 || ss.n_outputs() != 1) {
        throw std::invalid_argument("transfer function extraction requires a SISO model");
    }
    const int n = ss.order();
    if (n == 0) return DtTransferFunction({ss.D(0, 0)}, {1.0}, h);

    // Faddeev-LeVerrier gives both det(zI - A) and the adjugate expansion
    // adj(zI - A) = sum_k M_k z^{n-1-k} in one pass.
    std::vector<double> den(static_cast<size_t>(n) + 1, 0.0);
    den[0] = 1.0;
    std::vector<double> num(static_cast<size_t>(n) + 1, 0.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) {
        num[static_cast<size_t>(k) + 1] = (ss.C * m * ss.B)(0, 0);
        const Eigen::MatrixXd am = ss.A * m;
        den[static_cast<size_t>(k) + 1] = -am.trace() / static_cast<double>(k + 1);
        m = am + den[static_cast<size_t>(k) + 1] * Eigen::MatrixXd::Identity(n, n);
    }
    const double d = ss.D(0, 0);
    for (int k = 0; k <= n; ++k) num[static_cast<size_t>(k)] += d * den[static_cast<size_t>(k)];
    return DtTransferFunction(std::move(num), std::move(den), h);
}

std::vector<double> dt_lsim(const StateSpaceModel& ss, const std::vector<double>& u) {
    if (ss.n_inputs() != 1 || ss.n_outputs() != 1) {
        throw std::invalid_argument("dt_lsim requires a SISO model");
    }
    const int n = ss.order();
    const size_t len = u.size();
    std::vector<double> y(len);
    if (n == 0) {
        const double d = ss.D(0, 0);
        for (size_t k = 0; k < len; ++k) y[k] = d * u[k];
        return y;
    }
    // Flattened row-major propagation; this loop dominates the runtime of
    // every filtering operation, so keep it free of Eigen temporaries.
    std::vector<double> arow(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) arow[static_cast<size_t>(i) * n + j] = ss.A(i, j);
    std::vector<double> bv(static_cast<size_t>(n)), cv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) bv[static_cast<size_t>(i)] = ss.B(i, 0);
    for (int i = 0; i < n; ++i) cv[static_cast<size_t>(i)] = ss.C(0, i);
    const double d = ss.D(0, 0);

    std::vector<double> x(static_cast<size_t>(n), 0.0), xn(static_cast<size_t>(n));
    for (size_t k = 0; k < len; ++k) {
        const double uk = u[k];
        double yk = d * uk;
        for (int i = 0; i < n; ++i) yk += cv[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        y[k] = yk;
        for (int i = 0; i < n; ++i) {
            double acc = bv[static_cast<size_t>(i)] * uk;
            const double* ar = arow.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += ar[j] * x[static_cast<size_t>(j)];
            xn[static_cast<size_t>(i)] = acc;
        }
        x.swap(xn);
    }
    return y;
}

}  // namespace ctsid
