#include "ramanmem/modematch.hpp"

#include "ramanmem/errors.hpp"
#include "ramanmem/propagator.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace ramanmem {
namespace {

// Cumulative trapezoid of the linearly interpolated intensity.
class PulseAreaMap {
public:
    explicit PulseAreaMap(const ControlField& control) : control_(control) {
        const int n = control.size();
        cumulative_.resize(n, 0.0);
        const double h = control.step();
        for (int k = 1; k < n; ++k) {
            cumulative_[k] = cumulative_[k - 1] +
                             0.5 * h *
                                 (std::norm(control.samples()[k - 1]) +
                                  std::norm(control.samples()[k]));
        }
        const double total = cumulative_.back();
        scale_ = total > 0.0 ? control.coupling() / total : 0.0;
    }

    double operator()(double tau) const {
        const double h = control_.step();
        const int last = control_.size() - 1;
        const int k = std::clamp(static_cast<int>(tau / h), 0, last - 1);
        const double left = k * h;
        const double partial =
            0.5 * (tau - left) * (std::norm(control_.samples()[k]) + control_.intensity(tau));
        return std::min(scale_ * (cumulative_[k] + partial), control_.coupling());
    }

    double at_node(int k) const { return scale_ * cumulative_[k]; }

private:
    const ControlField& control_;
    std::vector<double> cumulative_;
    double scale_;
};

void check_coupling_match(const ModeDecomposition& decomp, const ControlField& control) {
    const double tol = 1e-12 * std::max(1.0, decomp.c);
    if (std::fabs(decomp.c - control.coupling()) > tol) {
        throw DomainError("coupling mismatch: decomposition has C=" + std::to_string(decomp.c) +
                          ", control has C=" + std::to_string(control.coupling()));
    }
}

Wavepacket magnitude_of(const Wavepacket& w) {
    return Wavepacket(w.samples().cwiseAbs().cast<cdouble>(), w.duration());
}

// Control nodes at cell boundaries and centres (2n + 1 samples), so the
// amplitude at each cell centre reproduces the cell intensity exactly.
ControlField control_from_cells(const std::vector<double>& cell_intensity, double duration,
                                double coupling) {
    const int n = static_cast<int>(cell_intensity.size());
    std::vector<double> nodes(2 * n + 1);
    for (int k = 0; k < n; ++k) {
        nodes[2 * k + 1] = cell_intensity[k];
    }
    nodes[0] = cell_intensity.front();
    nodes[2 * n] = cell_intensity.back();
    for (int k = 1; k < n; ++k) {
        nodes[2 * k] = 0.5 * (cell_intensity[k - 1] + cell_intensity[k]);
    }
    return ControlField::from_intensity(nodes, duration, coupling);
}

struct FallbackProblem {
    const Wavepacket* target;
    const ModeDecomposition* decomp;
    std::vector<double> knots;
    int n_cells;
};

std::vector<double> spline_cells(const FallbackProblem& prob, const double* log_values) {
    const int k = static_cast<int>(prob.knots.size());
    std::unique_ptr<gsl_interp_accel, decltype(&gsl_interp_accel_free)> acc(
        gsl_interp_accel_alloc(), gsl_interp_accel_free);
    std::unique_ptr<gsl_spline, decltype(&gsl_spline_free)> spline(
        gsl_spline_alloc(gsl_interp_cspline, k), gsl_spline_free);
    gsl_spline_init(spline.get(), prob.knots.data(), log_values, k);
    std::vector<double> cells(prob.n_cells);
    const double h = prob.target->step();
    for (int j = 0; j < prob.n_cells; ++j) {
        const double tau = std::clamp((j + 0.5) * h, prob.knots.front(), prob.knots.back());
        cells[j] = std::exp(std::clamp(gsl_spline_eval(spline.get(), tau, acc.get()), -60.0, 60.0));
    }
    return cells;
}

double fallback_objective(const gsl_vector* x, void* params) {
    const auto& prob = *static_cast<const FallbackProblem*>(params);
    const auto cells = spline_cells(prob, x->data);
    const ControlField control =
        control_from_cells(cells, prob.target->duration(), prob.decomp->c);
    const Wavepacket mode = mode_in_time(*prob.decomp, 1, control, prob.n_cells);
    return 1.0 - mode_overlap(mode, *prob.target);
}

struct Candidate {
    std::vector<double> cells;
    double overlap = 0.0;
};

Candidate optimize_spline(const Wavepacket& target, const ModeDecomposition& decomp,
                          const std::vector<double>& start_cells, const ShapeOptions& options) {
    const int n_knots = std::max(4, options.fallback_knots);
    FallbackProblem prob{&target, &decomp, {}, target.size()};
    for (int i = 0; i < n_knots; ++i) {
        prob.knots.push_back(target.duration() * (i + 0.5) / n_knots);
    }
    const double peak = *std::max_element(start_cells.begin(), start_cells.end());
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n_knots),
                                                              gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(n_knots),
                                                                 gsl_vector_free);
    for (int i = 0; i < n_knots; ++i) {
        const int cell = std::clamp(static_cast<int>(prob.knots[i] / target.step()), 0,
                                    target.size() - 1);
        gsl_vector_set(x.get(), i, std::log(std::max(start_cells[cell], 1e-8 * peak)));
    }
    gsl_vector_set_all(step.get(), 0.5);

    gsl_multimin_function fn{&fallback_objective, static_cast<std::size_t>(n_knots), &prob};
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n_knots),
        gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());
    for (int iter = 0; iter < options.fallback_max_iterations; ++iter) {
        if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) {
            break;
        }
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-6) ==
            GSL_SUCCESS) {
            break;
        }
    }
    Candidate best;
    best.cells = spline_cells(prob, gsl_multimin_fminimizer_x(solver.get())->data);
    best.overlap = 1.0 - gsl_multimin_fminimizer_minimum(solver.get());
    return best;
}

} // namespace

Wavepacket::Wavepacket(Eigen::VectorXcd samples, double duration)
    : samples_(std::move(samples)), duration_(duration), raw_norm_(0.0) {
    if (samples_.size() < 1) {
        throw DomainError("wavepacket: no samples");
    }
    if (!(duration > 0.0)) {
        throw DomainError("wavepacket: duration must be positive");
    }
    if (!samples_.allFinite()) {
        throw DomainError("wavepacket: non-finite sample");
    }
    raw_norm_ = samples_.squaredNorm() * step();
    if (!(raw_norm_ > 0.0)) {
        throw DomainError("wavepacket: zero amplitude cannot be normalized");
    }
    samples_ /= std::sqrt(raw_norm_);
}

double Wavepacket::norm() const {
    return samples_.squaredNorm() * step();
}

Wavepacket gaussian_wavepacket(int n, double duration, double tau0, double sigma) {
    if (n < 1 || !(sigma > 0.0)) {
        throw DomainError("gaussian_wavepacket: need n >= 1 and sigma > 0");
    }
    Eigen::VectorXcd s(n);
    const double h = duration / n;
    for (int k = 0; k < n; ++k) {
        const double u = ((k + 0.5) * h - tau0) / sigma;
        s(k) = std::exp(-2.0 * std::numbers::ln2 * u * u);
    }
    return Wavepacket(std::move(s), duration);
}

cdouble inner_product(const Wavepacket& a, const Wavepacket& b) {
    if (a.size() != b.size() || std::fabs(a.duration() - b.duration()) > 1e-12 * a.duration()) {
        throw DomainError("inner_product: wavepackets live on different meshes");
    }
    return a.samples().dot(b.samples()) * a.step();
}

double mode_overlap(const Wavepacket& a, const Wavepacket& b) {
    return std::norm(inner_product(a, b));
}

double pulse_area(const ControlField& control, double tau) {
    if (!(tau >= 0.0) || tau > control.duration()) {
        throw DomainError("pulse_area: tau=" + std::to_string(tau) + " outside [0, " +
                          std::to_string(control.duration()) + "]");
    }
    return PulseAreaMap(control)(tau);
}

std::vector<double> pulse_area_profile(const ControlField& control) {
    const PulseAreaMap map(control);
    std::vector<double> out(control.size());
    for (int k = 0; k < control.size(); ++k) {
        out[k] = map.at_node(k);
    }
    return out;
}

Wavepacket mode_in_time(const ModeDecomposition& decomp, int i, const ControlField& control,
                        int n_samples) {
    check_coupling_match(decomp, control);
    if (i < 1 || i > decomp.count()) {
        throw DomainError("mode_in_time: mode index " + std::to_string(i) + " out of range");
    }
    if (n_samples < 1) {
        throw DomainError("mode_in_time: need at least one sample");
    }
    const PulseAreaMap area(control);
    const double c = decomp.c;
    const double prefactor = std::sqrt(c / control.energy());
    const double h = control.duration() / n_samples;
    Eigen::VectorXcd s(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double tau = (k + 0.5) * h;
        s(k) = prefactor * control.amplitude(tau) * decomp.mode_value(i - 1, c - area(tau));
    }
    return Wavepacket(std::move(s), control.duration());
}

ShapedControl shape_control(const Wavepacket& target, const ModeDecomposition& decomp,
                            const ShapeOptions& options) {
    if (decomp.count() < 1) {
        throw DomainError("shape_control: decomposition holds no modes");
    }
    const Wavepacket goal = magnitude_of(target);
    const int n = goal.size();
    const double h = goal.step();
    const double c = decomp.c;

    // P at cell boundaries of the target mesh.
    std::vector<double> p(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
        p[k + 1] = p[k] + std::norm(goal.samples()(k)) * h;
    }
    // Q at cell boundaries of the mode grid; on a midpoint grid phi_1(C - u)
    // over cell m is the node value at n - 1 - m.
    const int ng = decomp.grid.size();
    const double w = decomp.grid.spacing();
    std::vector<double> q(ng + 1, 0.0);
    double phi_max = 0.0;
    for (int m = 0; m < ng; ++m) {
        const double v = decomp.modes(ng - 1 - m, 0);
        q[m + 1] = q[m] + w * v * v;
        phi_max = std::max(phi_max, v * v);
    }
    for (auto& v : q) {
        v /= q.back();
    }
    for (auto& v : p) {
        v /= p.back();
    }

    auto q_inverse = [&](double target_p) {
        auto it = std::upper_bound(q.begin(), q.end(), target_p);
        int m = static_cast<int>(it - q.begin()) - 1;
        m = std::clamp(m, 0, ng - 1);
        const double dq = q[m + 1] - q[m];
        const double frac = dq > 0.0 ? std::clamp((target_p - q[m]) / dq, 0.0, 1.0) : 0.0;
        return (m + frac) * w;
    };
    std::vector<double> area(n + 1);
    for (int k = 0; k <= n; ++k) {
        area[k] = std::min(q_inverse(p[k]), c);
    }
    area[n] = c;

    std::vector<double> cells(n);
    for (int k = 0; k < n; ++k) {
        cells[k] = std::max(0.0, area[k + 1] - area[k]) / h;
    }

    std::vector<double> positive;
    for (double v : cells) {
        if (v > 0.0) {
            positive.push_back(v);
        }
    }
    std::nth_element(positive.begin(), positive.begin() + positive.size() / 2, positive.end());
    const double cap = options.intensity_cap * positive[positive.size() / 2];
    // Only cells whose pulse area lands where phi_1 nearly vanishes are
    // clipped; elsewhere a large intensity is a genuine feature of the target.
    int capped = 0;
    for (int k = 0; k < n; ++k) {
        const double phi = decomp.mode_value(0, c - 0.5 * (area[k] + area[k + 1]));
        if (phi * phi < options.vanishing_fraction * phi_max && cells[k] > cap) {
            cells[k] = cap;
            ++capped;
        }
    }

    ShapedControl result{control_from_cells(cells, goal.duration(), c), 0.0, capped, false};
    result.overlap = mode_overlap(mode_in_time(decomp, 1, result.control, n), goal);
    if (capped == 0 && result.overlap >= options.min_overlap) {
        return result;
    }

    const Candidate alt = optimize_spline(goal, decomp, cells, options);
    if (alt.overlap > result.overlap) {
        result.control = control_from_cells(alt.cells, goal.duration(), c);
        result.overlap = mode_overlap(mode_in_time(decomp, 1, result.control, n), goal);
        result.used_fallback = true;
        result.capped_cells = 0;
    }
    if (result.overlap < options.min_overlap) {
        throw UnreachableShapeError("shape_control: best overlap " +
                                        std::to_string(result.overlap) + " below " +
                                        std::to_string(options.min_overlap),
                                    result.overlap);
    }
    return result;
}

ReadinResult simulate_readin(const Wavepacket& photon, const ControlField& control, int n_tau,
                             int n_z) {
    if (photon.size() != n_tau) {
        throw DomainError("simulate_readin: photon has " + std::to_string(photon.size()) +
                          " samples, mesh has " + std::to_string(n_tau));
    }
    if (std::fabs(photon.duration() - control.duration()) > 1e-12 * control.duration()) {
        throw DomainError("simulate_readin: photon and control durations differ");
    }
    BoundaryConditions bc{photon.samples(), Eigen::VectorXcd::Zero(n_z)};
    const FieldSolution sol = propagate_direct(control, bc, n_tau, n_z);
    ReadinResult r;
    r.efficiency = sol.b_out_flux();
    r.transmitted = sol.a_out_flux();
    r.intensity_map = sol.a_centers().cwiseAbs2();
    r.spin_wave = sol.b_out();
    r.transmitted_field = sol.a_out();
    return r;
}

double predicted_efficiency(const Wavepacket& photon, const ModeDecomposition& decomp,
                            const ControlField& control) {
    double total = 0.0;
    for (int i = 0; i < decomp.count(); ++i) {
        const Wavepacket mode = mode_in_time(decomp, i + 1, control, photon.size());
        total += decomp.lambdas[i] * decomp.lambdas[i] * mode_overlap(mode, photon);
    }
    return total;
}

} // namespace ramanmem
