#include "ramanmem/kernels.hpp"

#include "ramanmem/errors.hpp"

#include <cmath>
#include <ostream>

namespace ramanmem {

std::string to_string(KernelKind kind) {
    return kind == KernelKind::G0 ? "G0" : "G1";
}

KernelMatrix g0_matrix(const Grid& grid) {
    const int n = grid.size();
    Eigen::MatrixXd k(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double v = bessel_j(0, 2.0 * std::sqrt(grid.node(i) * grid.node(j)));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    for (int j = 0; j < n; ++j) {
        k.col(j) *= grid.weight(j);
    }
    return {grid, std::move(k), KernelKind::G0};
}

KernelMatrix g1_matrix(const Grid& grid) {
    const int n = grid.size();
    const double c = grid.coupling();
    // The causal term depends on x_i - x_j only; tabulate it by lag.
    std::vector<double> by_lag(n);
    by_lag[0] = c;
    for (int d = 1; d < n; ++d) {
        const double p = grid.node(d) - grid.node(0);
        by_lag[d] = std::sqrt(c / p) * bessel_j(1, 2.0 * std::sqrt(p * c));
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, i) = 1.0 - 0.5 * grid.weight(i) * by_lag[0];
        for (int j = 0; j < i; ++j) {
            k(i, j) = -grid.weight(j) * by_lag[i - j];
        }
    }
    return {grid, std::move(k), KernelKind::G1};
}

Eigen::MatrixXd reversal_matrix(int n) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        r(i, n - 1 - i) = 1.0;
    }
    return r;
}

Eigen::MatrixXd g0_scattering(const KernelMatrix& g0) {
    if (g0.kind != KernelKind::G0) {
        throw DomainError("g0_scattering: expected a G0 kernel");
    }
    return g0.entries.rowwise().reverse();
}

double composition_residual(const KernelMatrix& g0, const KernelMatrix& g1) {
    if (g0.grid.size() != g1.grid.size()) {
        throw DomainError("composition_residual: grid size mismatch");
    }
    const Eigen::MatrixXd s = g0_scattering(g0);
    const auto& c = g1.entries;
    const int n = g0.grid.size();
    // U = [[G1, S], [-S, G1]] acting on (alpha, beta) samples. Uniform
    // weights make the sample inner product proportional to the L2 one.
    Eigen::MatrixXd u(2 * n, 2 * n);
    u << c, s, -s, c;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double normal = (u.transpose() * u - id).cwiseAbs().maxCoeff();
    const double antinormal = (u * u.transpose() - id).cwiseAbs().maxCoeff();
    return std::max(normal, antinormal);
}

double persymmetry_residual(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("persymmetry_residual: matrix must be square");
    }
    const Eigen::MatrixXd flipped = m.transpose().colwise().reverse().rowwise().reverse();
    return (flipped - m).cwiseAbs().maxCoeff();
}

void write_kernel_csv(std::ostream& os, const KernelMatrix& kernel) {
    const auto old_precision = os.precision(17);
    os << "n,c,kind\n"
       << kernel.grid.size() << ',' << kernel.grid.coupling() << ',' << to_string(kernel.kind)
       << '\n';
    const int n = kernel.grid.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j > 0) {
                os << ',';
            }
            os << kernel.entries(i, j);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

} // namespace ramanmem
