#include "mlnum/control/riccati.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace mlnum::control {

namespace {

Eigen::MatrixXd as_matrix(const std::vector<double>& v, int rows, int cols, const char* what) {
    if (v.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument(std::string("riccati: bad shape for ") + what);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i) * cols + j];
    return m;
}

void require_psd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
        throw std::invalid_argument(std::string("riccati: ") + what + " is not PSD");
}

}  // namespace

LqSolution riccati_lq_reference(const LqSpec& spec) {
    const int n = spec.state_dim, m = spec.control_dim, T = spec.horizon;
    if (T < 0) throw std::invalid_argument("riccati: horizon must be nonnegative");
    const Eigen::MatrixXd A = as_matrix(spec.A, n, n, "A");
    const Eigen::MatrixXd B = as_matrix(spec.B, n, m, "B");
    const Eigen::MatrixXd Q = as_matrix(spec.Q, n, n, "Q");
    const Eigen::MatrixXd R = as_matrix(spec.R, m, m, "R");
    const Eigen::MatrixXd QT = spec.QT.empty() ? Q : as_matrix(spec.QT, n, n, "QT");
    require_psd(Q, "Q");
    require_psd(R, "R");
    require_psd(QT, "QT");

    Eigen::VectorXd s0(n);
    for (int i = 0; i < n; ++i) s0(i) = spec.s0[static_cast<std::size_t>(i)];
    Eigen::MatrixXd noise_cov = Eigen::MatrixXd::Zero(n, n);
    if (!spec.noise_std.empty())
        for (int i = 0; i < n; ++i)
            noise_cov(i, i) = spec.noise_std[static_cast<std::size_t>(i)] *
                              spec.noise_std[static_cast<std::size_t>(i)];

    Eigen::MatrixXd P = QT;
    double trace_acc = 0.0;
    LqSolution sol;
    sol.K.assign(static_cast<std::size_t>(T), {});
    for (int t = T - 1; t >= 0; --t) {
        const Eigen::MatrixXd G = R + B.transpose() * P * B;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (G + G.transpose()));
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw std::invalid_argument("riccati: R + B'PB is not positive definite");
        const Eigen::MatrixXd K = ldlt.solve(B.transpose() * P * A);
        trace_acc += (P * noise_cov).trace();
        P = Q + A.transpose() * P * A - A.transpose() * P * B * K;
        P = 0.5 * (P + P.transpose());
        auto& Kt = sol.K[static_cast<std::size_t>(t)];
        Kt.resize(static_cast<std::size_t>(m) * n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) Kt[static_cast<std::size_t>(i) * n + j] = K(i, j);
    }
    sol.optimal_cost = s0.dot(P * s0) + trace_acc;
    return sol;
}

}  // namespace mlnum::control
