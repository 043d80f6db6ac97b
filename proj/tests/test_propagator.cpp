#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ramanmem/errors.hpp"
#include "ramanmem/kernels.hpp"
#include "ramanmem/propagator.hpp"
#include "ramanmem/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace ramanmem;

namespace {

BoundaryConditions random_boundary(int n_tau, int n_z, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    BoundaryConditions bc{Eigen::VectorXcd(n_tau), Eigen::VectorXcd(n_z)};
    for (int k = 0; k < n_tau; ++k) {
        bc.a_in(k) = cdouble(normal(rng), normal(rng));
    }
    for (int m = 0; m < n_z; ++m) {
        bc.b_in(m) = cdouble(normal(rng), normal(rng));
    }
    return bc;
}

// Stored spin wave for a signal input and empty memory, written in the
// pulse-area coordinate and integrated over tau with a fine trapezoid rule:
//   B(T, z) = -gamma int eps*(t) J0(2 gamma sqrt(z (E(T) - E(t)))) A(t) dt.
double gaussian_intensity(double tau) {
    const double u = (tau - 0.5) / 0.3;
    return std::exp(-4.0 * std::log(2.0) * u * u);
}

std::vector<cdouble> oracle_spin_wave(double c, const std::vector<double>& z,
                                      double (*signal)(double)) {
    const int m = 20000;
    const double h = 1.0 / m;
    std::vector<double> e(m + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
        e[k] = e[k - 1] +
               0.5 * h * (gaussian_intensity((k - 1) * h) + gaussian_intensity(k * h));
    }
    const double gamma = c / std::sqrt(e[m]);
    std::vector<cdouble> out;
    for (double zz : z) {
        double s = 0.0;
        for (int k = 0; k <= m; ++k) {
            const double t = k * h;
            const double arg = 2.0 * gamma * std::sqrt(zz * (e[m] - e[k]));
            const double f = std::sqrt(gaussian_intensity(t)) *
                             std::cyl_bessel_j(0.0, arg) * signal(t);
            s += (k == 0 || k == m ? 0.5 : 1.0) * h * f;
        }
        out.emplace_back(-gamma * s);
    }
    return out;
}

double smooth_signal(double t) {
    return std::sin(std::acos(-1.0) * t) * (1.0 + t);
}

} // namespace

TEST_CASE("zero coupling passes both fields through") {
    std::mt19937_64 rng(1);
    const BoundaryConditions bc = random_boundary(30, 20, rng);
    const ControlField control = ControlField::constant(31, 1.0, 0.0);
    const FieldSolution sol = propagate_direct(control, bc, 30, 20);
    CHECK((sol.a_out() - bc.a_in).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sol.b_out() - bc.b_in).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flux is conserved for 50 random boundary and control combinations") {
    const auto cases = random_flux_cases(50, 99);
    REQUIRE(cases.size() == 50);
    int dispersive = 0;
    for (const auto& fc : cases) {
        CHECK(fc.relative_error < 1e-3);
        CHECK(fc.relative_error < 1e-12);
        dispersive += fc.kappa > 0.0 ? 1 : 0;
    }
    CHECK(dispersive == 25);
}

TEST_CASE("extracted propagator is unitary") {
    std::mt19937_64 rng(7);
    for (const ControlField& control :
         {ControlField::constant(101, 1.0, 2.0), ControlField::gaussian(101, 1.0, 2.0, 0.5, 0.3),
          random_smooth_control(101, 1.0, 2.0, rng)}) {
        CHECK(check_unitarity(greens_matrices(control, 100, 100)) < 1e-10);
    }
}

TEST_CASE("CW propagation reproduces the Bessel scattering kernels") {
    const int n = 200;
    const PropagatorMatrices pm = greens_matrices(ControlField::constant(n + 1, 1.0, 2.0), n, n);
    const Grid g = make_grid(n, 2.0);
    const Eigen::MatrixXcd g1 = g1_matrix(g).entries.cast<cdouble>();
    const Eigen::MatrixXcd s = g0_scattering(g0_matrix(g)).cast<cdouble>();
    CHECK((pm.ca - g1).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((pm.cb - g1).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((pm.sa - s).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((pm.sb - s).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("shaped control: stored spin wave matches the pulse-area oracle") {
    const int n = 400;
    const double c = 1.5;
    const ControlField control = ControlField::gaussian(n + 1, 1.0, c, 0.5, 0.3);
    BoundaryConditions bc{Eigen::VectorXcd(n), Eigen::VectorXcd::Zero(n)};
    const PropagationMesh mesh{n, n, 1.0};
    for (int k = 0; k < n; ++k) {
        bc.a_in(k) = smooth_signal(mesh.tau_center(k));
    }
    const FieldSolution sol = propagate_direct(control, bc, n, n);
    std::vector<double> zs;
    std::vector<int> idx;
    for (int m = 5; m < n; m += 49) {
        zs.push_back(mesh.z_center(m));
        idx.push_back(m);
    }
    const auto oracle = oracle_spin_wave(c, zs, &smooth_signal);
    double scale = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        scale = std::max(scale, std::abs(oracle[i]));
        worst = std::max(worst, std::abs(sol.b_out()(idx[i]) - oracle[i]));
    }
    CHECK(worst / scale < 1e-3);
}

TEST_CASE("small dispersivity is continuous with the dispersionless solution") {
    std::mt19937_64 rng(3);
    const BoundaryConditions bc = random_boundary(80, 80, rng);
    const ControlField control = ControlField::gaussian(81, 1.0, 2.0, 0.5, 0.3);
    const FieldSolution a = propagate_direct(control, bc, 80, 80);
    const FieldSolution b = propagate_direct(control.with_kappa(1e-7), bc, 80, 80);
    CHECK((a.a_out() - b.a_out()).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((a.b_out() - b.b_out()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("Stokes scattering satisfies the symplectic conditions") {
    const int n = 100;
    const StokesMatrices sm = stokes_greens_matrices(ControlField::constant(n + 1, 1.0, 1.0), n, n);
    CHECK(sm.n_signal == n);
    const SymplecticResidual r = check_symplectic(sm.c, sm.s, sm.n_signal);
    CHECK(r.normal < 1e-10);
    CHECK(r.cross < 1e-10);
    CHECK(r.antinormal < 1e-10);
}

TEST_CASE("symplectic check detects a flipped coupling sign") {
    const int n = 40;
    StokesMatrices sm = stokes_greens_matrices(ControlField::constant(n + 1, 1.0, 1.0), n, n);
    sm.s.bottomLeftCorner(n, n) *= -1.0;
    CHECK(check_symplectic(sm.c, sm.s, sm.n_signal).max() > 1e-2);
}

TEST_CASE("Stokes flux difference is conserved for a real control") {
    std::mt19937_64 rng(11);
    const BoundaryConditions bc = random_boundary(60, 50, rng);
    const FieldSolution sol =
        propagate_stokes(ControlField::gaussian(61, 1.0, 1.0, 0.4, 0.5), bc, 60, 50);
    const double lhs = sol.a_out_flux() - sol.a_in_flux();
    const double rhs = sol.b_out_flux() - sol.b_in_flux();
    CHECK(std::fabs(lhs - rhs) < 1e-10 * (sol.a_in_flux() + sol.b_in_flux()));
    CHECK(lhs > 0.0);
}

TEST_CASE("Stokes with zero coupling is the identity") {
    std::mt19937_64 rng(5);
    const BoundaryConditions bc = random_boundary(20, 20, rng);
    const FieldSolution sol = propagate_stokes(ControlField::constant(21, 1.0, 0.0), bc, 20, 20);
    CHECK((sol.a_out() - bc.a_in).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagator validates its inputs") {
    const ControlField control = ControlField::constant(11, 1.0, 1.0);
    BoundaryConditions bc{Eigen::VectorXcd::Zero(9), Eigen::VectorXcd::Zero(10)};
    CHECK_THROWS_AS(propagate_direct(control, bc, 10, 10), DomainError);
    // A control that jumps from zero to full strength in one cell.
    std::vector<cdouble> step(11, 0.0);
    for (int k = 6; k < 11; ++k) {
        step[k] = 1.0;
    }
    BoundaryConditions ok{Eigen::VectorXcd::Zero(10), Eigen::VectorXcd::Zero(10)};
    CHECK_THROWS_AS(propagate_direct(ControlField(step, 1.0, 1.0), ok, 10, 10), DomainError);
}

TEST_CASE("field CSV layout") {
    BoundaryConditions bc{Eigen::VectorXcd::Ones(3), Eigen::VectorXcd::Zero(2)};
    const FieldSolution sol = propagate_direct(ControlField::constant(4, 1.0, 1.0), bc, 3, 2);
    std::ostringstream os;
    write_field_csv(os, sol);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "tau,z,re_A,im_A,re_B,im_B");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 6);
}
