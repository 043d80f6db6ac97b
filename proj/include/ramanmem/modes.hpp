#pragma once

#include "ramanmem/grid.hpp"
#include "ramanmem/kernels.hpp"

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace ramanmem {

/// Solutions of the memory eigenproblem
///   int_0^C J0(2 sqrt(x y)) phi_i(y) dy = s_i phi_i(x)
/// ordered by |s_i|. lambdas hold |s_i| (clamped to 1), mus the
/// complementary amplitudes sqrt(1 - lambda^2), and signs the sign of s_i,
/// which is carried by the time-reversed output copy of each mode.
struct ModeDecomposition {
    double c = 0.0;
    Grid grid{1, 1.0};
    Eigen::MatrixXd modes;  ///< grid.size() x count, column i samples phi_i
    std::vector<double> lambdas;
    std::vector<double> mus;
    std::vector<int> signs;

    int count() const noexcept { return static_cast<int>(lambdas.size()); }

    /// phi_i(x) by linear interpolation between nodes, linear extrapolation
    /// over the half cells at either end. x is clamped to [0, c].
    double mode_value(int i, double x) const;
};

/// Eigen-solve of the symmetrized Nystrom matrix D^{1/2} K D^{-1/2}.
/// Throws DomainError if n_modes is out of range and NumericError if the
/// symmetrization or the eigen-residual check fails.
ModeDecomposition solve_modes(const Grid& grid, int n_modes);

/// Max-norm asymmetry of the symmetrized G0 matrix for this grid.
double symmetrization_residual(const Grid& grid);

/// max_{ij} |int phi_i phi_j dx - delta_ij| under grid quadrature.
double orthonormality_residual(const ModeDecomposition& decomp);

struct SingularValueRow {
    double c = 0.0;
    int index = 0;  ///< 1-based mode index
    double lambda = 0.0;
    double mu = 0.0;
    bool ok = true;
    std::string error;
};

/// Figure-style singular value table: one row per (C, i), in input order.
/// A failed solve yields rows with ok == false rather than an exception.
std::vector<SingularValueRow> singular_value_curve(std::span<const double> c_values,
                                                   int n_modes, int n);

/// Smallest lambda whose mode counts as resolved for the G1 check.
inline constexpr double kResolvedLambda = 1e-6;

struct ReconstructionResidual {
    double g0 = 0.0;  ///< max |G0 rebuilt - g0_scattering|
    double g1 = 0.0;  ///< max |<phi_i, G1 psi_j> - mu_i delta_ij| over the kept modes
};

/// Rebuilds the scattering kernel G0 from the first `rank` modes (all modes
/// when rank <= 0) and compares it with the directly assembled matrix. G1
/// contains an identity part that no finite mode set spans, so it is tested
/// by projecting the independently discretized causal kernel onto the kept
/// input/output pairs, where it must be diagonal with entries mu_i.
ReconstructionResidual reconstruct_kernel(const ModeDecomposition& decomp, int rank = 0);

} // namespace ramanmem
