#pragma once

#include "json.hpp"
#include <string>

namespace ramanmem {

struct ModesConfig {
    double c_min = 0.1;
    double c_max = 10.0;
    int c_steps = 100;
    int n_modes = 5;
    std::string mode_couplings = "0.5,1,2,5";  ///< C values for modes_C<v>.csv
};

struct ReadinConfig {
    double sigma = 0.125;
    double tau0 = 0.5;
    double duration = 1.0;
    int n_tau = 400;
    int n_z = 400;
    double min_overlap = 0.98;
    double intensity_cap = 1e3;
};

struct RetrievalConfig {
    double c_min = 0.2;
    double c_max = 6.0;
    double c_step = 0.2;
    double cr_min = 0.2;
    double cr_max = 14.0;
    double cr_step = 0.2;
    int n_modes = 20;
    int grid_n = 300;
};

struct TransverseConfig {
    int n_radial = 400;
    int n_modes = 10;
    std::string normalization = "flux-preserving";
};

struct VerifyConfig {
    int n_prop = 400;
    int n_stokes = 300;
    double stokes_c = 1.0;
    int flux_cases = 50;
    unsigned long long seed = 20240607ULL;
};

/// Pass/fail limits for `verify`; every residual is compared against one of these.
struct Thresholds {
    double circle = 1e-12;
    double orthonormality = 1e-8;
    double symmetrization = 1e-12;
    double reconstruction_g0 = 1e-8;
    double reconstruction_g1 = 1e-4;
    double unitarity = 5e-3;
    double equivalence = 1e-3;
    double flux = 1e-3;
    double symplectic = 1e-2;
    double parseval = 1e-6;
    double transverse_orthonormality = 1e-6;
    double readin_efficiency = 0.9;
    double readin_balance = 1e-3;
};

struct RunConfig {
    std::string output_dir = "ramanmem_out";
    bool json = false;
    int grid_n = 500;
    double c = 2.0;
    ModesConfig modes;
    ReadinConfig readin;
    RetrievalConfig retrieval;
    TransverseConfig transverse;
    VerifyConfig verify;
    Thresholds thresholds;
};

/// Overlays a JSON document onto `base`. Unknown keys and wrongly typed
/// values raise DomainError naming the offending field.
RunConfig apply_json(const RunConfig& base, const nlohmann::json& doc);

/// Field-level validation; throws DomainError listing every bad field.
void validate(const RunConfig& config);

/// Full config as JSON, for echoing into reports.
nlohmann::json to_json(const RunConfig& config);

/// Parses "a.b.c=value" into a nested JSON patch. The value is read as JSON
/// when possible and as a plain string otherwise.
nlohmann::json override_patch(const std::string& assignment);

} // namespace ramanmem
