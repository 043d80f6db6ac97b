#pragma once

#include "ramanmem/config.hpp"
#include "ramanmem/control.hpp"

#include <random>
#include <string>
#include <vector>

namespace ramanmem {

/// |eps| = |1 + sum_m c_m sin(pi m tau / T + phi_m)| with m <= 3 and random
/// complex c_m of modulus at most 0.3, phase-modulated. Smooth enough for a
/// 100-cell tau mesh.
ControlField random_smooth_control(int n_samples, double duration, double coupling,
                                   std::mt19937_64& rng, double kappa = 0.0);

struct FluxCase {
    double coupling = 0.0;
    double kappa = 0.0;
    double relative_error = 0.0;  ///< |flux_out - flux_in| / flux_in
};

/// Random boundaries and controls through propagate_direct; half the cases
/// use a nonzero dispersivity.
std::vector<FluxCase> random_flux_cases(int count, unsigned long long seed, int n_tau = 120,
                                        int n_z = 80);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool at_least = false;  ///< passes when value >= threshold instead of <=
    bool passed = false;
    std::string error;      ///< set when the check could not be evaluated
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs every residual check of the library against config.thresholds.
/// Individual failures are recorded, never thrown.
VerifyReport run_verify(const RunConfig& config);

} // namespace ramanmem
