#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ramanmem/errors.hpp"
#include "ramanmem/transverse.hpp"

#include <cmath>

using namespace ramanmem;

TEST_CASE("paraxial modes are orthonormal with descending magnitudes") {
    const auto d = paraxial_modes(2.0, 400, 10);
    CHECK(transverse_orthonormality_residual(d) < 1e-6);
    REQUIRE(d.sigmas.size() == 10);
    for (std::size_t j = 0; j < d.sigmas.size(); ++j) {
        CHECK(d.sigmas[j] > 0.0);
        CHECK(d.sigmas[j] <= 1.0);
        if (j > 0) {
            CHECK(d.sigmas[j] <= d.sigmas[j - 1]);
        }
    }
}

TEST_CASE("flux-preserving kernel reduces to the unit-coupling longitudinal problem") {
    // In u = rho^2 the radial operator is the J0 kernel on [0, 1].
    const auto d = paraxial_modes(2.0, 400, 3);
    const ModeDecomposition unit = solve_modes(make_grid(800, 1.0), 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(d.sigmas[j] == doctest::Approx(unit.lambdas[j]).epsilon(1e-3));
    }
    CHECK(d.normalization_constant == doctest::Approx(2.0 / std::acos(-1.0)));
    // The coupling cancels out of the flux-preserving kernel.
    CHECK(paraxial_modes(0.7, 200, 1).sigmas[0] ==
          doctest::Approx(paraxial_modes(5.0, 200, 1).sigmas[0]).epsilon(1e-12));
}

TEST_CASE("unit Hilbert-Schmidt normalization") {
    const auto d = paraxial_modes(2.0, 300, 300, KernelNormalization::UnitHilbertSchmidt);
    double total = 0.0;
    for (double s : d.sigmas) {
        total += s * s;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(d.sigmas[0] == doctest::Approx(0.995).epsilon(0.01));
}

TEST_CASE("dominant mode has the predicted chirped form") {
    const auto d = paraxial_modes(2.0, 400, 2);
    const ModeDecomposition unit = solve_modes(make_grid(800, 1.0), 1);
    const double dist = phase_aligned_distance(d.radial_modes.col(0),
                                               predicted_dominant_mode(d, unit), d.area_weights);
    CHECK(dist <= 0.05);
    CHECK(d.radial_modes(0, 0).imag() == doctest::Approx(0.0));
    CHECK(d.radial_modes(0, 0).real() > 0.0);
    CHECK_THROWS_AS(predicted_dominant_mode(d, solve_modes(make_grid(50, 2.0), 1)), DomainError);
}

TEST_CASE("radial mesh convergence") {
    const double a = paraxial_modes(2.0, 400, 1).sigmas[0];
    const double b = paraxial_modes(2.0, 800, 1).sigmas[0];
    CHECK(std::fabs(a - b) <= 1e-3);
}

TEST_CASE("waist fit recovers an exact Gaussian") {
    Eigen::VectorXd rho(200);
    Eigen::VectorXd mag(200);
    for (int k = 0; k < 200; ++k) {
        rho(k) = (k + 0.5) / 200.0;
        mag(k) = 0.8 * std::exp(-rho(k) * rho(k) / (1.45 * 1.45));
    }
    const WaistFit fit = gaussian_waist_fit(rho, mag);
    CHECK(fit.waist == doctest::Approx(1.45).epsilon(1e-6 / 1.45));
    CHECK(fit.amplitude == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(fit.control_waist == doctest::Approx(3.0 * fit.waist));
    CHECK(fit.rms_residual < 1e-8);
}

TEST_CASE("dominant paraxial mode has waist 1.45") {
    const WaistFit fit = gaussian_waist_fit(paraxial_modes(2.0, 400, 1));
    CHECK(fit.waist == doctest::Approx(1.45).epsilon(0.05 / 1.45));
}

TEST_CASE("waist fit rejects a non-monotone profile") {
    Eigen::VectorXd rho(50);
    Eigen::VectorXd mag(50);
    for (int k = 0; k < 50; ++k) {
        rho(k) = (k + 0.5) / 50.0;
        mag(k) = 1.0 + 0.5 * std::sin(10.0 * rho(k));
    }
    CHECK_THROWS_AS(gaussian_waist_fit(rho, mag), NumericError);
}

TEST_CASE("composed transverse and longitudinal transfer factorizes") {
    const auto t = paraxial_modes(2.0, 150, 3);
    const ModeDecomposition l = solve_modes(make_grid(300, 2.0), 3);
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const cdouble sig = composed_transfer_amplitude(t, l, i, j, true);
            const cdouble spin = composed_transfer_amplitude(t, l, i, j, false);
            CHECK(std::abs(sig - t.sigmas[j - 1] * l.mus[i - 1]) < 1e-2);
            CHECK(std::abs(spin - t.sigmas[j - 1] * l.lambdas[i - 1]) < 1e-2);
        }
    }
}

TEST_CASE("paraxial_modes validates inputs") {
    CHECK_THROWS_AS(paraxial_modes(0.0, 100, 1), DomainError);
    CHECK_THROWS_AS(paraxial_modes(1.0, 1, 1), DomainError);
    CHECK_THROWS_AS(paraxial_modes(1.0, 10, 11), DomainError);
}
