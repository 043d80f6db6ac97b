#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ramanmem/errors.hpp"
#include "ramanmem/kernels.hpp"

#include <cmath>
#include <sstream>

using namespace ramanmem;

TEST_CASE("g0 entries are weighted J0(2 sqrt(x y))") {
    const Grid g(50, 2.0);
    const KernelMatrix k = g0_matrix(g);
    CHECK(k.kind == KernelKind::G0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            const double ref =
                g.weight(j) * std::cyl_bessel_j(0.0, 2.0 * std::sqrt(g.node(i) * g.node(j)));
            worst = std::max(worst, std::fabs(k.entries(i, j) - ref));
        }
    }
    CHECK(worst < 1e-14);
    CHECK((k.entries - k.entries.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("g1 is causal with the half-weight diagonal") {
    const Grid g(40, 1.5);
    const KernelMatrix k = g1_matrix(g);
    CHECK(k.kind == KernelKind::G1);
    for (int i = 0; i < 40; ++i) {
        CHECK(k.entries(i, i) == doctest::Approx(1.0 - 0.5 * g.spacing() * 1.5));
        for (int j = i + 1; j < 40; ++j) {
            CHECK(k.entries(i, j) == 0.0);
        }
    }
    // Off-diagonal entries follow -w sqrt(C / p) J1(2 sqrt(p C)) with p the lag.
    const double p = g.node(7) - g.node(2);
    const double ref = -g.spacing() * std::sqrt(1.5 / p) *
                       std::cyl_bessel_j(1.0, 2.0 * std::sqrt(p * 1.5));
    CHECK(k.entries(7, 2) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("weak coupling: G1 tends to identity, G0 to zero") {
    const Grid g(30, 1e-6);
    const KernelMatrix k1 = g1_matrix(g);
    const KernelMatrix k0 = g0_matrix(g);
    CHECK((k1.entries - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(k0.entries.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("scattering kernel reverses columns") {
    const Grid g(5, 1.0);
    const KernelMatrix k = g0_matrix(g);
    const Eigen::MatrixXd s = g0_scattering(k);
    CHECK((s - k.entries * reversal_matrix(5)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(g0_scattering(g1_matrix(g)), DomainError);
}

TEST_CASE("kernel composition is unitary up to discretization error") {
    double previous = 1.0;
    for (int n : {100, 200, 400}) {
        const Grid g(n, 2.0);
        const double r = composition_residual(g0_matrix(g), g1_matrix(g));
        CHECK(r < previous);
        previous = r;
    }
    CHECK(previous < 1e-2);
}

TEST_CASE("persymmetry residual") {
    Eigen::MatrixXd toeplitz(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            toeplitz(i, j) = 1.0 / (1.0 + std::abs(i - j));
        }
    }
    CHECK(persymmetry_residual(toeplitz) < 1e-15);
    Eigen::MatrixXd skewed = toeplitz;
    skewed(0, 1) += 0.25;
    CHECK(persymmetry_residual(skewed) == doctest::Approx(0.25));
    CHECK_THROWS_AS(persymmetry_residual(Eigen::MatrixXd::Zero(2, 3)), DomainError);
}

TEST_CASE("kernel CSV dump") {
    std::ostringstream os;
    write_kernel_csv(os, g0_matrix(Grid(3, 1.0)));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,c,kind");
    std::getline(in, line);
    CHECK(line == "3,1,G0");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 3);
}
