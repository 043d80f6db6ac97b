#pragma once

#include "ramanmem/modes.hpp"

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace ramanmem {

/// Thread-safe memo of mode decompositions keyed by coupling.
class ModeCache {
public:
    ModeCache(int grid_n, int n_modes);

    std::shared_ptr<const ModeDecomposition> get(double c);
    int grid_size() const noexcept { return grid_n_; }
    int mode_count() const noexcept { return n_modes_; }

private:
    int grid_n_;
    int n_modes_;
    std::mutex mutex_;
    std::map<double, std::shared_ptr<const ModeDecomposition>> cache_;
};

/// Number of uniform z points used for the overlap integrals.
inline constexpr int kOverlapMeshPoints = 2000;

/// Overlaps f_i = sqrt(Cr C) int_0^1 phi^r_i[Cr (1 - z)] phi_1(C z) dz.
///
/// Both mode families are interpolated onto the z mesh; the readout family
/// is re-orthonormalized under the trapezoid inner product there, so that
/// sum_i f_i^2 obeys Bessel's inequality exactly.
std::vector<double> overlaps(double c, double c_r, int n_modes, int grid_n);

struct RetrievalPoint {
    double c = 0.0;
    double c_r = 0.0;
    std::vector<double> overlaps;
    std::vector<double> lambda_r;
    double lambda1 = 0.0;
    double n = 0.0;           ///< retrieval probability
    double tail_bound = 0.0;  ///< lambda^r_{k+1}^2 (1 - sum f_i^2)
    bool ok = true;
    std::string error;
};

/// N = lambda_1(C)^2 sum_i lambda^r_i^2 f_i^2, truncated at n_modes.
RetrievalPoint retrieval_point(double c, double c_r, int n_modes, ModeCache& cache);
double retrieval_probability(double c, double c_r, int n_modes, int grid_n);

/// All (C, Cr) cells ordered by C then Cr. Per-cell failures are flagged.
std::vector<RetrievalPoint> retrieval_map(std::span<const double> c_values,
                                          std::span<const double> c_r_values, int n_modes,
                                          int grid_n);

/// Readout of an arbitrary stored spin wave B(z) sampled on n cell centres
/// of [0, 1] (e.g. ReadinResult::spin_wave): sum_i lambda^r_i^2 |g_i|^2 with
/// g_i = sqrt(Cr) int phi^r_i[Cr (1 - z)] B(z) dz.
double readout_from_spin_wave(const Eigen::VectorXcd& spin_wave, double c_r, int n_modes,
                              int grid_n);

} // namespace ramanmem
