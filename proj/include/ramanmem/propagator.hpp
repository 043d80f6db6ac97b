#pragma once

#include "ramanmem/control.hpp"

#include <Eigen/Dense>
#include <iosfwd>

namespace ramanmem {

/// Cell-centred rectangle [0, T] x [0, 1] for the envelope equations.
/// A is sampled at tau cell centres, B at z cell centres.
struct PropagationMesh {
    int n_tau = 0;
    int n_z = 0;
    double duration = 1.0;

    double dtau() const noexcept { return duration / n_tau; }
    double dz() const noexcept { return 1.0 / n_z; }
    double tau_center(int k) const noexcept { return (k + 0.5) * dtau(); }
    double z_center(int m) const noexcept { return (m + 0.5) * dz(); }
};

struct BoundaryConditions {
    Eigen::VectorXcd a_in;  ///< A(tau_k, z = 0), one value per tau cell
    Eigen::VectorXcd b_in;  ///< B(tau = 0, z_m), one value per z cell
};

/// A lives on constant-z faces (n_tau x (n_z + 1)); B on constant-tau faces
/// ((n_tau + 1) x n_z). Column 0 of a and row 0 of b are the inputs.
struct FieldSolution {
    PropagationMesh mesh;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd b;

    Eigen::VectorXcd a_out() const { return a.col(mesh.n_z); }
    Eigen::VectorXcd b_out() const { return b.row(mesh.n_tau).transpose(); }
    Eigen::VectorXcd a_in() const { return a.col(0); }
    Eigen::VectorXcd b_in() const { return b.row(0).transpose(); }

    /// A and B averaged onto cell centres (n_tau x n_z).
    Eigen::MatrixXcd a_centers() const;
    Eigen::MatrixXcd b_centers() const;

    /// int |A(tau, L)|^2 dtau, and the other three boundary fluxes.
    double a_out_flux() const;
    double b_out_flux() const;
    double a_in_flux() const;
    double b_in_flux() const;
};

/// Signal and spin-wave blocks of the scattering matrix
///   A_L = ca A_0 + sa B_0,   B_T = cb B_0 - sb A_0,
/// expressed in the orthonormal basis sqrt(dtau) A, sqrt(dz) B.
struct PropagatorMatrices {
    Eigen::MatrixXcd ca;
    Eigen::MatrixXcd sa;
    Eigen::MatrixXcd sb;
    Eigen::MatrixXcd cb;

    /// U = [[ca, sa], [-sb, cb]].
    Eigen::MatrixXcd assemble() const;
};

/// Blocks of X = C X0 + S X0^* for the Stokes problem with
/// C = diag(CA, CB) and S = [[0, SA], [-SB, 0]], in the same orthonormal
/// basis. Extracted as full matrices; the block structure is not imposed.
struct StokesMatrices {
    Eigen::MatrixXcd c;
    Eigen::MatrixXcd s;
    int n_signal = 0;  ///< size of the A block, for the metric Z
};

/// Marches the memory equations
///   dB/dtau = -gamma eps*(tau - kappa z) A,   dA/dz = gamma eps(tau - kappa z) B
/// cell by cell with the trapezoidal box scheme. Each cell is a 2x2 solve,
/// so the march stays explicit in (tau, z) order. The discrete boundary flux
/// is conserved exactly for any control.
FieldSolution propagate_direct(const ControlField& control, const BoundaryConditions& bc,
                               int n_tau, int n_z);

/// Stokes variant: dB/dtau = gamma eps* A^*, dA/dz = gamma eps B^*.
/// The cell update couples amplitudes to conjugates and is solved as a real
/// 4x4 system. The flux difference is conserved exactly when gamma eps is real.
FieldSolution propagate_stokes(const ControlField& control, const BoundaryConditions& bc,
                               int n_tau, int n_z);

/// Impulse-response extraction of the four memory blocks.
PropagatorMatrices greens_matrices(const ControlField& control, int n_tau, int n_z);

/// Impulse-response extraction for the Stokes problem. Real and imaginary
/// impulses separate the linear (C) and conjugate-linear (S) parts.
StokesMatrices stokes_greens_matrices(const ControlField& control, int n_tau, int n_z);

/// max(|U^+ U - I|_max, |U U^+ - I|_max).
double check_unitarity(const PropagatorMatrices& m);

struct SymplecticResidual {
    double normal = 0.0;       ///< |C^+ Z C + S^T Z S^* - Z|_max
    double cross = 0.0;        ///< |C^+ Z S + S^T Z C^*|_max
    double antinormal = 0.0;   ///< |C Z C^+ + S Z S^+ - Z|_max
    double max() const noexcept;
};

/// Checks the flux-difference (Z-metric) conditions on Stokes blocks.
/// n_signal is the dimension of the A block; Z = diag(I_n_signal, -I).
SymplecticResidual check_symplectic(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& s,
                                    int n_signal);

/// CSV with header tau,z,re_A,im_A,re_B,im_B at cell centres.
void write_field_csv(std::ostream& os, const FieldSolution& solution);

} // namespace ramanmem
