#include "ramanmem/transverse.hpp"

#include "ramanmem/errors.hpp"
#include "ramanmem/grid.hpp"
#include "ramanmem/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace ramanmem {

const char* to_string(KernelNormalization normalization) {
    switch (normalization) {
    case KernelNormalization::FluxPreserving:
        return "flux-preserving";
    case KernelNormalization::UnitHilbertSchmidt:
        return "unit-hilbert-schmidt";
    }
    return "unknown";
}

TransverseDecomposition paraxial_modes(double c, int n_radial, int n_modes,
                                       KernelNormalization normalization) {
    if (!(c > 0.0)) {
        throw DomainError("paraxial_modes: c must be positive");
    }
    if (n_radial < 2) {
        throw DomainError("paraxial_modes: need at least two radial points");
    }
    if (n_modes < 1 || n_modes > n_radial) {
        throw DomainError("paraxial_modes: mode count " + std::to_string(n_modes) +
                          " outside [1, " + std::to_string(n_radial) + "]");
    }
    const double pi = std::numbers::pi;
    TransverseDecomposition d;
    d.c = c;
    d.normalization = normalization;
    d.rho.resize(n_radial);
    d.area_weights.resize(n_radial);
    const double h = 1.0 / n_radial;
    for (int k = 0; k < n_radial; ++k) {
        d.rho(k) = (k + 0.5) * h;
        d.area_weights(k) = 2.0 * pi * d.rho(k) * h;
    }

    // Angular integral of N exp(-i |rho - rho'|^2) / C over the unit-disc
    // area element leaves (N / C) J0(2 rho rho') e^{-i(rho^2 + rho'^2)} per
    // unit area.
    Eigen::MatrixXcd unscaled(n_radial, n_radial);
    for (int l = 0; l < n_radial; ++l) {
        for (int k = 0; k <= l; ++k) {
            const double r2 = d.rho(k) * d.rho(k) + d.rho(l) * d.rho(l);
            const cdouble v = bessel_j(0, 2.0 * d.rho(k) * d.rho(l)) *
                              std::polar(1.0, -r2) / c;
            unscaled(k, l) = v;
            unscaled(l, k) = v;
        }
    }
    const Eigen::VectorXd sqrt_a = d.area_weights.cwiseSqrt();
    Eigen::MatrixXcd m = sqrt_a.asDiagonal() * unscaled * sqrt_a.asDiagonal();
    if (normalization == KernelNormalization::FluxPreserving) {
        d.normalization_constant = c / pi;
    } else {
        d.normalization_constant = 1.0 / m.norm();
    }
    m *= d.normalization_constant;
    d.kernel = d.normalization_constant * unscaled * d.area_weights.asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericError("paraxial_modes: SVD did not converge", 0.0);
    }
    const Eigen::MatrixXcd& u = svd.matrixU();
    const Eigen::MatrixXcd& v = svd.matrixV();
    d.radial_modes.resize(n_radial, n_modes);
    d.output_modes.resize(n_radial, n_modes);
    for (int j = 0; j < n_modes; ++j) {
        const cdouble axis = v(0, j);
        const cdouble phase = std::abs(axis) > 0.0 ? std::conj(axis) / std::abs(axis) : 1.0;
        const Eigen::VectorXcd vin = v.col(j) * phase;
        const Eigen::VectorXcd uout = u.col(j) * phase;
        d.radial_modes.col(j) = vin.cwiseQuotient(sqrt_a.cast<cdouble>());
        d.output_modes.col(j) = uout.cwiseQuotient(sqrt_a.cast<cdouble>());
        d.sigmas.push_back(svd.singularValues()(j));
        // Takagi phase: output mode relative to the conjugated input mode.
        d.phases.push_back(std::arg(vin.conjugate().dot(uout)));
    }

    const Eigen::MatrixXcd check = m * v.leftCols(n_modes) -
                                   u.leftCols(n_modes) *
                                       svd.singularValues().head(n_modes).asDiagonal();
    const double residual = check.cwiseAbs().maxCoeff();
    if (!(residual < 1e-8)) {
        throw NumericError("paraxial_modes: singular triplet residual too large", residual);
    }
    return d;
}

double transverse_orthonormality_residual(const TransverseDecomposition& decomp) {
    const Eigen::MatrixXcd gram = decomp.radial_modes.adjoint() *
                                  decomp.area_weights.asDiagonal() * decomp.radial_modes;
    const auto k = gram.rows();
    return (gram - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
}

Eigen::VectorXcd predicted_dominant_mode(const TransverseDecomposition& decomp,
                                         const ModeDecomposition& unit_coupling_modes) {
    if (std::fabs(unit_coupling_modes.c - 1.0) > 1e-12) {
        throw DomainError("predicted_dominant_mode: longitudinal modes must be at C = 1");
    }
    const auto n = decomp.rho.size();
    Eigen::VectorXcd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double u = decomp.rho(k) * decomp.rho(k);
        out(k) = std::polar(unit_coupling_modes.mode_value(0, u) / std::sqrt(std::numbers::pi), u);
    }
    return out;
}

double phase_aligned_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                              const Eigen::VectorXd& area_weights) {
    if (a.size() != b.size() || a.size() != area_weights.size()) {
        throw DomainError("phase_aligned_distance: size mismatch");
    }
    cdouble overlap = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        overlap += std::conj(a(k)) * b(k) * area_weights(k);
    }
    const cdouble phase = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : 1.0;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        sum += std::norm(a(k) - b(k) * phase) * area_weights(k);
    }
    return std::sqrt(sum);
}

namespace {

struct FitData {
    const Eigen::VectorXd* rho;
    const Eigen::VectorXd* mag;
};

// Residual sum of squares with the amplitude eliminated analytically.
double profile_residual(double w, const FitData& data, double* amplitude) {
    double sgm = 0.0;
    double sgg = 0.0;
    for (Eigen::Index k = 0; k < data.rho->size(); ++k) {
        const double r = (*data.rho)(k);
        const double g = std::exp(-r * r / (w * w));
        sgm += g * (*data.mag)(k);
        sgg += g * g;
    }
    const double a = sgm / sgg;
    if (amplitude) {
        *amplitude = a;
    }
    double ss = 0.0;
    for (Eigen::Index k = 0; k < data.rho->size(); ++k) {
        const double r = (*data.rho)(k);
        const double e = (*data.mag)(k) - a * std::exp(-r * r / (w * w));
        ss += e * e;
    }
    return ss;
}

double profile_residual_gsl(double w, void* params) {
    return profile_residual(w, *static_cast<const FitData*>(params), nullptr);
}

} // namespace

WaistFit gaussian_waist_fit(const Eigen::VectorXd& rho, const Eigen::VectorXd& magnitude) {
    if (rho.size() != magnitude.size() || rho.size() < 3) {
        throw DomainError("gaussian_waist_fit: need at least three matching samples");
    }
    const double peak = magnitude.maxCoeff();
    if (!(peak > 0.0)) {
        throw DomainError("gaussian_waist_fit: profile is identically zero");
    }
    for (Eigen::Index k = 1; k < magnitude.size(); ++k) {
        const double rise = magnitude(k) - magnitude(k - 1);
        if (rise > 1e-3 * peak) {
            throw NumericError("gaussian_waist_fit: profile is not monotone decreasing", rise);
        }
    }

    FitData data{&rho, &magnitude};
    // Coarse log scan to bracket the minimum.
    const double lo = 0.05;
    const double hi = 100.0;
    const int scan = 200;
    int best = 0;
    std::vector<double> ws(scan + 1);
    std::vector<double> fs(scan + 1);
    for (int i = 0; i <= scan; ++i) {
        ws[i] = lo * std::pow(hi / lo, static_cast<double>(i) / scan);
        fs[i] = profile_residual(ws[i], data, nullptr);
        if (fs[i] < fs[best]) {
            best = i;
        }
    }
    double w = ws[best];
    if (best > 0 && best < scan) {
        gsl_function fn{&profile_residual_gsl, &data};
        std::unique_ptr<gsl_min_fminimizer, decltype(&gsl_min_fminimizer_free)> solver(
            gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent), gsl_min_fminimizer_free);
        gsl_error_handler_t* old = gsl_set_error_handler_off();
        int status = gsl_min_fminimizer_set_with_values(solver.get(), &fn, ws[best], fs[best],
                                                        ws[best - 1], fs[best - 1],
                                                        ws[best + 1], fs[best + 1]);
        for (int iter = 0; status == GSL_SUCCESS && iter < 200; ++iter) {
            status = gsl_min_fminimizer_iterate(solver.get());
            const double a = gsl_min_fminimizer_x_lower(solver.get());
            const double b = gsl_min_fminimizer_x_upper(solver.get());
            if (gsl_min_test_interval(a, b, 1e-12, 1e-12) == GSL_SUCCESS) {
                break;
            }
        }
        if (status == GSL_SUCCESS) {
            w = gsl_min_fminimizer_x_minimum(solver.get());
        }
        gsl_set_error_handler(old);
    }

    WaistFit fit;
    fit.waist = w;
    const double ss = profile_residual(w, data, &fit.amplitude);
    fit.rms_residual = std::sqrt(ss / rho.size());
    fit.control_waist = 3.0 * w;
    return fit;
}

WaistFit gaussian_waist_fit(const TransverseDecomposition& decomp) {
    if (decomp.radial_modes.cols() < 1) {
        throw DomainError("gaussian_waist_fit: decomposition holds no modes");
    }
    return gaussian_waist_fit(decomp.rho, decomp.radial_modes.col(0).cwiseAbs());
}

cdouble composed_transfer_amplitude(const TransverseDecomposition& transverse,
                                    const ModeDecomposition& longitudinal, int i, int j,
                                    bool from_signal) {
    if (i < 1 || i > longitudinal.count() || j < 1 || j > transverse.radial_modes.cols()) {
        throw DomainError("composed_transfer_amplitude: mode index out of range");
    }
    const int n = longitudinal.grid.size();
    const double w = longitudinal.grid.spacing();
    const Eigen::MatrixXd l = from_signal ? g1_matrix(longitudinal.grid).entries
                                          : g0_scattering(g0_matrix(longitudinal.grid));

    const Eigen::VectorXd in_long =
        longitudinal.signs[i - 1] * longitudinal.modes.col(i - 1).reverse();
    const Eigen::VectorXcd in_trans = transverse.radial_modes.col(j - 1);
    Eigen::MatrixXcd input(n, in_trans.size());
    input = in_long.cast<cdouble>() * in_trans.transpose();

    // Longitudinal kernel along rows, transverse kernel along columns.
    const Eigen::MatrixXcd output = l.cast<cdouble>() * input * transverse.kernel.transpose();

    const Eigen::VectorXcd out_trans = transverse.output_modes.col(j - 1);
    const Eigen::VectorXcd proj_trans =
        output * out_trans.conjugate().cwiseProduct(transverse.area_weights.cast<cdouble>());
    return w * longitudinal.modes.col(i - 1).cast<cdouble>().dot(proj_trans);
}

} // namespace ramanmem
