#pragma once

#include "ramanmem/control.hpp"
#include "ramanmem/modes.hpp"

#include <Eigen/Dense>
#include <vector>

namespace ramanmem {

/// Photon temporal amplitude on the cell centres of a uniform mesh over
/// [0, T], normalized so that sum |xi_k|^2 dtau = 1.
class Wavepacket {
public:
    /// Normalizes the samples; throws DomainError on a zero vector.
    Wavepacket(Eigen::VectorXcd samples, double duration);

    const Eigen::VectorXcd& samples() const noexcept { return samples_; }
    int size() const noexcept { return static_cast<int>(samples_.size()); }
    double duration() const noexcept { return duration_; }
    double step() const noexcept { return duration_ / samples_.size(); }
    double center(int k) const noexcept { return (k + 0.5) * step(); }
    double norm() const;

    /// Norm of the samples before normalization.
    double raw_norm() const noexcept { return raw_norm_; }

private:
    Eigen::VectorXcd samples_;
    double duration_;
    double raw_norm_;
};

/// xi(tau) proportional to exp(-2 ln2 ((tau - tau0)/sigma)^2).
Wavepacket gaussian_wavepacket(int n, double duration, double tau0, double sigma);

/// |int a^* b dtau|^2; both packets must share a mesh.
double mode_overlap(const Wavepacket& a, const Wavepacket& b);
cdouble inner_product(const Wavepacket& a, const Wavepacket& b);

/// eps(tau) = C int_0^tau |eps|^2 / E, integrating the linearly interpolated
/// intensity (cumulative trapezoid at the nodes). eps(0) = 0, eps(T) = C.
double pulse_area(const ControlField& control, double tau);

/// Pulse area at every control node.
std::vector<double> pulse_area_profile(const ControlField& control);

/// Phi_i(tau) = sqrt(C/E) eps(tau) phi_i[C - eps(tau)] on n_samples cell
/// centres (i is 1-based). Throws DomainError if the couplings differ.
Wavepacket mode_in_time(const ModeDecomposition& decomp, int i, const ControlField& control,
                        int n_samples);

struct ShapeOptions {
    double min_overlap = 0.98;
    /// Intensity cap relative to the median of the nonzero implied intensity.
    double intensity_cap = 1e3;
    /// phi_1^2 below this fraction of its maximum counts as vanishing.
    double vanishing_fraction = 1e-6;
    int fallback_knots = 16;
    int fallback_max_iterations = 4000;
};

struct ShapedControl {
    ControlField control;
    double overlap = 0.0;
    int capped_cells = 0;         ///< cells clipped by the intensity cap
    bool used_fallback = false;   ///< the spline optimizer produced the result
};

/// Finds a real nonnegative control whose dominant mode matches |target|.
///
/// The connection relation gives d(eps)/dtau phi_1^2(C - eps) = |Phi_1|^2,
/// so with P(tau) = int_0^tau |xi|^2 and Q(u) = int_0^u phi_1^2(C - u') du'
/// the pulse area is eps(tau) = Q^{-1}(P(tau)). The control intensity is
/// its derivative. If the result is capped or falls short of
/// options.min_overlap, a Nelder-Mead search over a spline of the
/// log-intensity is tried; UnreachableShapeError reports the best overlap
/// when both fail.
ShapedControl shape_control(const Wavepacket& target, const ModeDecomposition& decomp,
                            const ShapeOptions& options = {});

struct ReadinResult {
    double efficiency = 0.0;   ///< int |B(T, z)|^2 dz
    double transmitted = 0.0;  ///< int |A(tau, L)|^2 dtau
    Eigen::MatrixXd intensity_map;  ///< |A|^2 at cell centres, n_tau x n_z
    Eigen::VectorXcd spin_wave;     ///< B(T, z_m)
    Eigen::VectorXcd transmitted_field;  ///< A(tau_k, L)
};

/// Stores a photon: a_in = photon, b_in = 0. photon.size() must equal n_tau.
ReadinResult simulate_readin(const Wavepacket& photon, const ControlField& control,
                             int n_tau, int n_z);

/// sum_i lambda_i^2 |<Phi_i, xi>|^2 over the modes held by decomp.
double predicted_efficiency(const Wavepacket& photon, const ModeDecomposition& decomp,
                            const ControlField& control);

} // namespace ramanmem
