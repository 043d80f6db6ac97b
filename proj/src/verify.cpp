#include "ramanmem/verify.hpp"

#include "ramanmem/errors.hpp"
#include "ramanmem/kernels.hpp"
#include "ramanmem/modematch.hpp"
#include "ramanmem/modes.hpp"
#include "ramanmem/propagator.hpp"
#include "ramanmem/readout.hpp"
#include "ramanmem/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

namespace ramanmem {

ControlField random_smooth_control(int n_samples, double duration, double coupling,
                                   std::mt19937_64& rng, double kappa) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    cdouble coeff[3];
    double phase[3];
    for (int m = 0; m < 3; ++m) {
        coeff[m] = std::polar(0.3 * unit(rng), two_pi * unit(rng));
        phase[m] = two_pi * unit(rng);
    }
    const double chirp = unit(rng);
    std::vector<cdouble> s(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double tau = duration * k / (n_samples - 1);
        cdouble v = 1.0;
        for (int m = 0; m < 3; ++m) {
            v += coeff[m] * std::sin(std::numbers::pi * (m + 1) * tau / duration + phase[m]);
        }
        s[k] = v * std::polar(1.0, chirp * std::sin(std::numbers::pi * tau / duration));
    }
    return ControlField(std::move(s), duration, coupling, kappa);
}

std::vector<FluxCase> random_flux_cases(int count, unsigned long long seed, int n_tau,
                                        int n_z) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<FluxCase> out;
    for (int i = 0; i < count; ++i) {
        FluxCase fc;
        fc.coupling = 0.5 + 4.5 * unit(rng);
        fc.kappa = (i % 2 == 1) ? 0.5 * unit(rng) : 0.0;
        const ControlField control =
            random_smooth_control(n_tau + 1, 1.0, fc.coupling, rng, fc.kappa);
        BoundaryConditions bc{Eigen::VectorXcd(n_tau), Eigen::VectorXcd(n_z)};
        for (int k = 0; k < n_tau; ++k) {
            bc.a_in(k) = cdouble(normal(rng), normal(rng));
        }
        for (int m = 0; m < n_z; ++m) {
            bc.b_in(m) = cdouble(normal(rng), normal(rng));
        }
        const FieldSolution sol = propagate_direct(control, bc, n_tau, n_z);
        const double in = sol.a_in_flux() + sol.b_in_flux();
        const double outf = sol.a_out_flux() + sol.b_out_flux();
        fc.relative_error = std::fabs(outf - in) / in;
        out.push_back(fc);
    }
    return out;
}

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json j{{"name", c.name},
                         {"value", c.value},
                         {"threshold", c.threshold},
                         {"bound", c.at_least ? "min" : "max"},
                         {"passed", c.passed}};
        if (!c.error.empty()) {
            j["error"] = c.error;
        }
        arr.push_back(std::move(j));
    }
    return {{"passed", passed()}, {"checks", std::move(arr)}};
}

namespace {

class Checker {
public:
    void upper(const std::string& name, double threshold, const std::function<double()>& fn) {
        run(name, threshold, false, fn);
    }
    void lower(const std::string& name, double threshold, const std::function<double()>& fn) {
        run(name, threshold, true, fn);
    }
    VerifyReport report;

private:
    void run(const std::string& name, double threshold, bool at_least,
             const std::function<double()>& fn) {
        CheckResult r{name, 0.0, threshold, at_least, false, {}};
        try {
            r.value = fn();
            r.passed = std::isfinite(r.value) &&
                       (at_least ? r.value >= threshold : r.value <= threshold);
        } catch (const std::exception& e) {
            r.value = std::nan("");
            r.error = e.what();
        }
        report.checks.push_back(std::move(r));
    }
};

} // namespace

VerifyReport run_verify(const RunConfig& cfg) {
    const auto& th = cfg.thresholds;
    const int n = cfg.grid_n;
    Checker chk;

    chk.upper("singular_value_circle", th.circle, [&] {
        double worst = 0.0;
        for (double c : {0.5, 1.0, 2.0, 5.0}) {
            const auto d = solve_modes(make_grid(n, c), cfg.modes.n_modes);
            for (int i = 0; i < d.count(); ++i) {
                worst = std::max(worst, std::fabs(d.lambdas[i] * d.lambdas[i] +
                                                  d.mus[i] * d.mus[i] - 1.0));
            }
        }
        return worst;
    });

    const ModeDecomposition modes = solve_modes(make_grid(n, cfg.c), std::min(20, n - 1));
    chk.upper("mode_orthonormality", th.orthonormality,
              [&] { return orthonormality_residual(modes); });
    chk.upper("symmetrization", th.symmetrization,
              [&] { return symmetrization_residual(modes.grid); });
    const ReconstructionResidual recon = reconstruct_kernel(modes);
    chk.upper("reconstruction_g0", th.reconstruction_g0, [&] { return recon.g0; });
    chk.upper("reconstruction_g1", th.reconstruction_g1, [&] { return recon.g1; });

    chk.upper("lambda1_monotonicity", 1e-6, [&] {
        std::vector<double> cs;
        for (int i = 0; i < cfg.modes.c_steps; ++i) {
            cs.push_back(cfg.modes.c_min +
                         (cfg.modes.c_max - cfg.modes.c_min) * i / (cfg.modes.c_steps - 1));
        }
        const auto rows = singular_value_curve(cs, 1, n);
        double drop = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!rows[i].ok || !rows[i - 1].ok) {
                throw NumericError("singular value solve failed at C=" +
                                       std::to_string(rows[i].c),
                                   0.0);
            }
            drop = std::max(drop, rows[i - 1].lambda - rows[i].lambda);
        }
        return drop;
    });

    const int np = cfg.verify.n_prop;
    chk.upper("unitarity_cw", th.unitarity, [&] {
        return check_unitarity(greens_matrices(ControlField::constant(np + 1, 1.0, cfg.c), np, np));
    });
    chk.upper("unitarity_gaussian", th.unitarity, [&] {
        return check_unitarity(
            greens_matrices(ControlField::gaussian(np + 1, 1.0, cfg.c, 0.5, 0.3), np, np));
    });
    chk.upper("unitarity_random", th.unitarity, [&] {
        std::mt19937_64 rng(cfg.verify.seed);
        return check_unitarity(
            greens_matrices(random_smooth_control(np + 1, 1.0, cfg.c, rng), np, np));
    });
    chk.upper("kernel_equivalence", th.equivalence, [&] {
        const PropagatorMatrices pm =
            greens_matrices(ControlField::constant(np + 1, 1.0, cfg.c), np, np);
        const Grid g = make_grid(np, cfg.c);
        const Eigen::MatrixXcd g1 = g1_matrix(g).entries.cast<cdouble>();
        const Eigen::MatrixXcd s = g0_scattering(g0_matrix(g)).cast<cdouble>();
        return std::max({(pm.ca - g1).cwiseAbs().maxCoeff(), (pm.cb - g1).cwiseAbs().maxCoeff(),
                         (pm.sa - s).cwiseAbs().maxCoeff(), (pm.sb - s).cwiseAbs().maxCoeff()});
    });
    chk.upper("flux_conservation", th.flux, [&] {
        double worst = 0.0;
        for (const auto& fc : random_flux_cases(cfg.verify.flux_cases, cfg.verify.seed)) {
            worst = std::max(worst, fc.relative_error);
        }
        return worst;
    });
    chk.upper("stokes_symplectic", th.symplectic, [&] {
        const int ns = cfg.verify.n_stokes;
        const StokesMatrices sm = stokes_greens_matrices(
            ControlField::constant(ns + 1, 1.0, cfg.verify.stokes_c), ns, ns);
        return check_symplectic(sm.c, sm.s, sm.n_signal).max();
    });

    const auto& rc = cfg.readin;
    std::optional<ReadinResult> readin;
    std::string readin_error;
    try {
        const Wavepacket photon = gaussian_wavepacket(rc.n_tau, rc.duration, rc.tau0, rc.sigma);
        ShapeOptions opt;
        opt.min_overlap = rc.min_overlap;
        opt.intensity_cap = rc.intensity_cap;
        const ShapedControl shaped = shape_control(photon, modes, opt);
        readin = simulate_readin(photon, shaped.control, rc.n_tau, rc.n_z);
    } catch (const std::exception& e) {
        readin_error = e.what();
    }
    auto readin_value = [&](auto fn) {
        return [&, fn] {
            if (!readin) {
                throw NumericError(readin_error, 0.0);
            }
            return fn(*readin);
        };
    };
    chk.lower("readin_efficiency", th.readin_efficiency,
              readin_value([](const ReadinResult& r) { return r.efficiency; }));
    chk.upper("readin_balance", th.readin_balance, readin_value([](const ReadinResult& r) {
                  return std::fabs(r.efficiency + r.transmitted - 1.0);
              }));

    chk.upper("parseval_bound", th.parseval, [&] {
        ModeCache cache(cfg.retrieval.grid_n, cfg.retrieval.n_modes);
        double worst = -1.0;
        for (double c : {0.5, 2.0, 6.0}) {
            for (double cr : {0.5, 2.0, 8.0, 14.0}) {
                const RetrievalPoint p = retrieval_point(c, cr, cfg.retrieval.n_modes, cache);
                double sum = 0.0;
                for (double f : p.overlaps) {
                    sum += f * f;
                }
                worst = std::max(worst, sum - 1.0);
            }
        }
        return std::max(worst, 0.0);
    });

    chk.upper("transverse_orthonormality", th.transverse_orthonormality, [&] {
        const auto t = paraxial_modes(cfg.c, cfg.transverse.n_radial, cfg.transverse.n_modes);
        return transverse_orthonormality_residual(t);
    });

    return chk.report;
}

} // namespace ramanmem
