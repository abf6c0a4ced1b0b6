#include "ctsid/discretize.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ctsid {

namespace {

void require_period(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("sample period must be positive");
}

}  // namespace

StateSpaceModel c2d_zoh_ss(const StateSpaceModel& ct, double h) {
    require_period(h);
    const int n = ct.order();
    const int m = ct.n_inputs();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = ct.A;
    aug.topRightCorner(n, m) = ct.B;
    const Eigen::MatrixXd e = matrix_exponential(aug * h);
    return StateSpaceModel(e.topLeftCorner(n, n), e.topRightCorner(n, m), ct.C, ct.D);
}

StateSpaceModel c2d_foh_ss(const StateSpaceModel& ct, double h) {
    require_period(h);
    const int n = ct.order();
    const int m = ct.n_inputs();
    // exp of [[A B 0],[0 0 I],[0 0 0]]h yields Phi, G1 = int e^{As}B ds and
    // G2 = int e^{A(h-s)} B s ds in the top block row.
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 2 * m, n + 2 * m);
    aug.topLeftCorner(n, n) = ct.A;
    aug.block(0, n, n, m) = ct.B;
    aug.block(n, n + m, m, m) = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd e = matrix_exponential(aug * h);
    const Eigen::MatrixXd phi = e.topLeftCorner(n, n);
    const Eigen::MatrixXd g1 = e.block(0, n, n, m);
    const Eigen::MatrixXd g2 = e.block(0, n + m, n, m);
    // State shifted by (G2/h) u to absorb the dependence on u[k+1].
    const Eigen::MatrixXd bd = g1 + (phi - Eigen::MatrixXd::Identity(n, n)) * g2 / h;
    const Eigen::MatrixXd dd = ct.D + ct.C * g2 / h;
    return StateSpaceModel(phi, bd, ct.C, dd);
}

DtTransferFunction c2d_zoh(const CtTransferFunction& g, double h, C2dInfo* info) {
    require_period(h);
    if (info) {
        info->pole_aliasing = false;
        const auto poles = g.poles();
        double pole_scale = 1.0;
        for (const auto& p : poles) pole_scale = std::max(pole_scale, std::abs(p));
        for (size_t i = 0; i < poles.size(); ++i) {
            for (size_t j = i + 1; j < poles.size(); ++j) {
                const bool distinct = std::abs(poles[i] - poles[j]) > 1e-8 * pole_scale;
                const std::complex<double> zi = std::exp(poles[i] * h);
                const std::complex<double> zj = std::exp(poles[j] * h);
                const double z_scale = std::max(1.0, std::max(std::abs(zi), std::abs(zj)));
                if (distinct && std::abs(zi - zj) < 1e-8 * z_scale) info->pole_aliasing = true;
            }
        }
    }
    return ss_to_dt_tf(c2d_zoh_ss(realize_ct(g), h), h);
}

}  // namespace ctsid
