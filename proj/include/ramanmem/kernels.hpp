#pragma once

#include "ramanmem/grid.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace ramanmem {

enum class KernelKind { G0, G1 };

std::string to_string(KernelKind kind);

/// Dense quadrature discretization of one of the two dispersionless
/// Green's kernels. Rows index the output sample, columns the input sample;
/// quadrature weights are folded into the columns.
struct KernelMatrix {
    Grid grid;
    Eigen::MatrixXd entries;
    KernelKind kind;
};

/// entries(i, j) = w_j J0(2 sqrt(x_i x_j)).
KernelMatrix g0_matrix(const Grid& grid);

/// Identity (the delta term) minus the causal Bessel-J1 convolution.
///
/// For x_i > x_j the subtracted entry is w_j sqrt(c/p) J1(2 sqrt(p c)) with
/// p = x_i - x_j. On the diagonal the analytic p -> 0 limit (c) is used with
/// half a cell of weight. Entries above the diagonal vanish.
KernelMatrix g1_matrix(const Grid& grid);

/// Exchange matrix R, (R f)_i = f_{n-1-i}. On a midpoint grid this is the
/// argument reversal x -> c - x.
Eigen::MatrixXd reversal_matrix(int n);

/// G0 in the form it enters the scattering relations: input argument
/// reversed, i.e. entries(i, j) = w_j J0(2 sqrt(x_i (c - x_j))).
Eigen::MatrixXd g0_scattering(const KernelMatrix& g0);

/// Max-norm residual of the discretized flux-conservation identities
/// (G1^T G1 + S^T S = I and G1 G1^T + S S^T = I with S = g0_scattering).
double composition_residual(const KernelMatrix& g0, const KernelMatrix& g1);

/// Max-norm asymmetry of R M^T R versus M (zero for a persymmetric M).
double persymmetry_residual(const Eigen::MatrixXd& m);

/// CSV dump: a "n,c,kind" header line and its values, then the n rows.
void write_kernel_csv(std::ostream& os, const KernelMatrix& kernel);

} // namespace ramanmem
