#pragma once

#include "ramanmem/modes.hpp"
#include "ramanmem/types.hpp"

#include <Eigen/Dense>
#include <vector>

namespace ramanmem {

/// Convention for the free constant N of the far-field diffraction kernel.
enum class KernelNormalization {
    /// |N| pi / C = 1: the unbounded-aperture kernel is a unitary Hankel
    /// transform, so the largest singular value tends to 1 as rho_max grows.
    FluxPreserving,
    /// Hilbert-Schmidt norm of the unit-aperture kernel equal to 1, i.e.
    /// sum_j sigma_j^2 = 1.
    UnitHilbertSchmidt,
};

const char* to_string(KernelNormalization normalization);

/// Cylindrically symmetric paraxial modes on the unit-Fresnel-number disc.
struct TransverseDecomposition {
    double c = 0.0;
    KernelNormalization normalization = KernelNormalization::FluxPreserving;
    double normalization_constant = 0.0;  ///< |N|
    std::vector<double> sigmas;           ///< |sigma_j|, descending
    std::vector<double> phases;           ///< arg of the Takagi factor of each sigma_j
    Eigen::VectorXd rho;                  ///< radial midpoint mesh on [0, 1]
    Eigen::VectorXd area_weights;         ///< 2 pi rho d rho
    Eigen::MatrixXcd radial_modes;        ///< input modes, one per column
    Eigen::MatrixXcd output_modes;        ///< output modes, one per column
    Eigen::MatrixXcd kernel;              ///< operator matrix, weights folded into columns
};

/// Builds R(rho - rho', C) = N exp(-i |rho - rho'|^2) / C on the unit disc,
/// integrates out the angle analytically (2 pi J0(2 rho rho') times the
/// quadratic phases), discretizes with the area measure and takes the SVD of
/// the complex symmetric matrix. Each input mode is phased so that its value
/// nearest the axis is real and positive.
TransverseDecomposition paraxial_modes(double c, int n_radial, int n_modes,
                                       KernelNormalization normalization =
                                           KernelNormalization::FluxPreserving);

/// max_{jk} |int phi_j^* phi_k dA - delta_jk|.
double transverse_orthonormality_residual(const TransverseDecomposition& decomp);

/// e^{i rho^2} phi^1(rho^2) / sqrt(pi) sampled on decomp.rho, with phi^1 the
/// dominant longitudinal mode at C = 1.
Eigen::VectorXcd predicted_dominant_mode(const TransverseDecomposition& decomp,
                                         const ModeDecomposition& unit_coupling_modes);

/// L2 distance (area measure) between two radial profiles after removing the
/// best global phase.
double phase_aligned_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                              const Eigen::VectorXd& area_weights);

struct WaistFit {
    double waist = 0.0;          ///< w in |phi_1| ~ a exp(-rho^2 / w^2)
    double amplitude = 0.0;
    double rms_residual = 0.0;
    double control_waist = 0.0;  ///< minimum recommended control waist, 3 w
};

/// Least-squares fit over rho in [0, 1]. Throws NumericError if |phi_1| is
/// not monotone decreasing within tolerance.
WaistFit gaussian_waist_fit(const TransverseDecomposition& decomp);

/// Same fit for an explicit radial profile.
WaistFit gaussian_waist_fit(const Eigen::VectorXd& rho, const Eigen::VectorXd& magnitude);

/// Coefficient of output mode (i, j) produced by the full transverse x
/// longitudinal operator acting on the separable input phi_j(rho) phi_i(C - x)
/// (signal input when from_signal, otherwise spin-wave input). The
/// product structure predicts sigma_j mu_i and sigma_j lambda_i respectively.
cdouble composed_transfer_amplitude(const TransverseDecomposition& transverse,
                                    const ModeDecomposition& longitudinal, int i, int j,
                                    bool from_signal);

} // namespace ramanmem
