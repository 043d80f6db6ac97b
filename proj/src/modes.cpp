#include "ramanmem/modes.hpp"

#include "ramanmem/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ramanmem {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

Eigen::MatrixXd symmetrized_g0(const Grid& grid, const KernelMatrix& g0) {
    const int n = grid.size();
    Eigen::VectorXd sqrt_w(n);
    for (int i = 0; i < n; ++i) {
        sqrt_w(i) = std::sqrt(grid.weight(i));
    }
    return sqrt_w.asDiagonal() * g0.entries * sqrt_w.cwiseInverse().asDiagonal();
}

} // namespace

double ModeDecomposition::mode_value(int i, double x) const {
    const int n = grid.size();
    const double h = grid.spacing();
    if (n == 1) {
        return modes(0, i);
    }
    x = std::clamp(x, 0.0, c);
    const double t = x / h - 0.5;
    const int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
    const double frac = t - k;
    return (1.0 - frac) * modes(k, i) + frac * modes(k + 1, i);
}

double symmetrization_residual(const Grid& grid) {
    const Eigen::MatrixXd s = symmetrized_g0(grid, g0_matrix(grid));
    return (s - s.transpose()).cwiseAbs().maxCoeff();
}

ModeDecomposition solve_modes(const Grid& grid, int n_modes) {
    const int n = grid.size();
    if (n_modes < 1 || n_modes > n) {
        throw DomainError("solve_modes: n_modes must lie in [1, " + std::to_string(n) +
                          "], got " + std::to_string(n_modes));
    }
    const Eigen::MatrixXd sym = symmetrized_g0(grid, g0_matrix(grid));
    const double asymmetry = (sym - sym.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > kSymmetryTolerance) {
        throw NumericError("solve_modes: symmetrized kernel is not symmetric", asymmetry);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("solve_modes: eigen-solver did not converge",
                           std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::fabs(values(a)) > std::fabs(values(b)); });

    ModeDecomposition out;
    out.c = grid.coupling();
    out.grid = grid;
    out.modes.resize(n, n_modes);
    out.lambdas.resize(n_modes);
    out.mus.resize(n_modes);
    out.signs.resize(n_modes);

    double residual = 0.0;
    for (int col = 0; col < n_modes; ++col) {
        const int idx = order[col];
        const double s = values(idx);
        Eigen::VectorXd v = vectors.col(idx);
        residual = std::max(residual, (sym * v - s * v).cwiseAbs().maxCoeff());

        Eigen::VectorXd phi(n);
        for (int i = 0; i < n; ++i) {
            phi(i) = v(i) / std::sqrt(grid.weight(i));
        }
        double integral = 0.0;
        for (int i = 0; i < n; ++i) {
            integral += grid.weight(i) * phi(i);
        }
        bool flip = integral < 0.0;
        if (std::fabs(integral) < 1e-10) {
            const double scale = phi.cwiseAbs().maxCoeff();
            for (int i = 0; i < n; ++i) {
                if (std::fabs(phi(i)) > 1e-12 * scale) {
                    flip = phi(i) < 0.0;
                    break;
                }
            }
        }
        if (flip) {
            phi = -phi;
        }
        out.modes.col(col) = phi;
        const double lambda = std::min(std::fabs(s), 1.0);
        out.lambdas[col] = lambda;
        out.mus[col] = std::sqrt(1.0 - lambda * lambda);
        out.signs[col] = s < 0.0 ? -1 : 1;
    }
    if (!(residual <= 1e-9)) {
        throw NumericError("solve_modes: eigen-residual too large", residual);
    }
    return out;
}

double orthonormality_residual(const ModeDecomposition& decomp) {
    const auto& w = decomp.grid.weights();
    const Eigen::Map<const Eigen::VectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::MatrixXd gram =
        decomp.modes.transpose() * weights.asDiagonal() * decomp.modes;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

std::vector<SingularValueRow> singular_value_curve(std::span<const double> c_values,
                                                   int n_modes, int n) {
    std::vector<std::vector<SingularValueRow>> per_c(c_values.size());
    detail::parallel_for(c_values.size(), [&](std::size_t k) {
        const double c = c_values[k];
        auto& rows = per_c[k];
        try {
            const ModeDecomposition d = solve_modes(make_grid(n, c), n_modes);
            for (int i = 0; i < n_modes; ++i) {
                rows.push_back({c, i + 1, d.lambdas[i], d.mus[i], true, {}});
            }
        } catch (const std::exception& e) {
            rows.clear();
            for (int i = 0; i < n_modes; ++i) {
                rows.push_back({c, i + 1, 0.0, 0.0, false, e.what()});
            }
        }
    });
    std::vector<SingularValueRow> out;
    for (auto& rows : per_c) {
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

ReconstructionResidual reconstruct_kernel(const ModeDecomposition& decomp, int rank) {
    const int n = decomp.grid.size();
    const int k = rank <= 0 ? decomp.count() : std::min(rank, decomp.count());
    const double w = decomp.grid.spacing();

    // Output copy of each mode: the time-reversed mode carrying the sign of
    // the eigenvalue, so that both kernels share one nonnegative spectrum.
    Eigen::MatrixXd out_copy(n, k);
    for (int i = 0; i < k; ++i) {
        out_copy.col(i) = decomp.signs[i] * w * decomp.modes.col(i).reverse();
    }
    const Eigen::MatrixXd phi = decomp.modes.leftCols(k);
    Eigen::VectorXd lam(k);
    Eigen::VectorXd mu(k);
    for (int i = 0; i < k; ++i) {
        lam(i) = decomp.lambdas[i];
        mu(i) = decomp.mus[i];
    }
    const Eigen::MatrixXd g0_rebuilt = phi * lam.asDiagonal() * out_copy.transpose();

    const Eigen::MatrixXd g0_direct = g0_scattering(g0_matrix(decomp.grid));
    const Eigen::MatrixXd g1_direct = g1_matrix(decomp.grid).entries;
    // G1 keeps an identity part that no finite set of modes spans, so it is
    // checked in the leading subspace: <phi_i, G1 psi_j> = mu_i delta_ij.
    // Modes with lambda below kResolvedLambda sit in the numerically
    // degenerate null space, where the reversal symmetry is not resolved.
    int resolved = 0;
    while (resolved < k && decomp.lambdas[resolved] >= kResolvedLambda) {
        ++resolved;
    }
    double g1_residual = 0.0;
    if (resolved > 0) {
        Eigen::MatrixXd proj = w * phi.leftCols(resolved).transpose() * g1_direct *
                               (out_copy.leftCols(resolved) / w);
        proj.diagonal() -= mu.head(resolved);
        g1_residual = proj.cwiseAbs().maxCoeff();
    }
    return {(g0_rebuilt - g0_direct).cwiseAbs().maxCoeff(), g1_residual};
}

} // namespace ramanmem
