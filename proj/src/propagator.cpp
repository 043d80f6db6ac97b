#include "ramanmem/propagator.hpp"

#include "ramanmem/csv.hpp"
#include "ramanmem/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace ramanmem {
namespace {

PropagationMesh make_mesh(const ControlField& control, int n_tau, int n_z) {
    if (n_tau < 2 || n_z < 2) {
        throw DomainError("propagator: meshes need at least two cells each, got n_tau=" +
                          std::to_string(n_tau) + ", n_z=" + std::to_string(n_z));
    }
    return {n_tau, n_z, control.duration()};
}

// gamma eps(tau - kappa z) at every cell centre.
Eigen::MatrixXcd cell_couplings(const ControlField& control, const PropagationMesh& mesh) {
    const double gamma = control.gamma();
    Eigen::MatrixXcd g(mesh.n_tau, mesh.n_z);
    if (control.kappa() == 0.0) {
        for (int k = 0; k < mesh.n_tau; ++k) {
            g.row(k).setConstant(gamma * control.amplitude(mesh.tau_center(k)));
        }
        double jump = 0.0;
        for (int k = 0; k + 1 < mesh.n_tau; ++k) {
            jump = std::max(jump, std::abs(g(k + 1, 0) - g(k, 0)));
        }
        if (gamma > 0.0 && jump / gamma > 0.1) {
            throw DomainError("propagator: control changes by " + std::to_string(jump / gamma) +
                              " of its peak between tau cells; refine n_tau");
        }
        return g;
    }
    for (int k = 0; k < mesh.n_tau; ++k) {
        for (int m = 0; m < mesh.n_z; ++m) {
            const double local = mesh.tau_center(k) - control.kappa() * mesh.z_center(m);
            g(k, m) = gamma * control.amplitude(local);
        }
    }
    return g;
}

void check_boundary(const BoundaryConditions& bc, const PropagationMesh& mesh) {
    if (bc.a_in.size() != mesh.n_tau || bc.b_in.size() != mesh.n_z) {
        throw DomainError("propagator: boundary data sizes (" + std::to_string(bc.a_in.size()) +
                          ", " + std::to_string(bc.b_in.size()) + ") do not match mesh (" +
                          std::to_string(mesh.n_tau) + ", " + std::to_string(mesh.n_z) + ")");
    }
}

// One trapezoidal box cell of the memory equations. Unknowns a' = A(k, m+1)
// and b' = B(k+1, m) follow from a 2x2 solve:
//   a' = a + p (b + b'),  b' = b - q (a + a'),  p = dz g / 2, q = dtau g* / 2.
struct MemoryCell {
    static void step(cdouble g, double dtau, double dz, cdouble& a, cdouble& b) {
        const cdouble p = 0.5 * dz * g;
        const cdouble q = 0.5 * dtau * std::conj(g);
        const double pq = 0.25 * dz * dtau * std::norm(g);
        const double inv = 1.0 / (1.0 + pq);
        const cdouble a_next = (a * (1.0 - pq) + 2.0 * p * b) * inv;
        const cdouble b_next = (b * (1.0 - pq) - 2.0 * q * a) * inv;
        a = a_next;
        b = b_next;
    }
};

// Stokes cell: a' = a + p conj(b + b'), b' = b + q conj(a + a').
struct StokesCell {
    static void step(cdouble g, double dtau, double dz, cdouble& a, cdouble& b) {
        const cdouble p = 0.5 * dz * g;
        const cdouble q = 0.5 * dtau * std::conj(g);
        const cdouble r1 = a + p * std::conj(b);
        const cdouble r2 = b + q * std::conj(a);
        const cdouble a_next = (r1 + p * std::conj(r2)) / (1.0 - p * std::conj(q));
        b = r2 + q * std::conj(a_next);
        a = a_next;
    }
};

// Marches all cells in (tau, z) order. b_row holds B on the current tau face.
template <class Cell>
void march(const Eigen::MatrixXcd& g, const PropagationMesh& mesh, const Eigen::VectorXcd& a_in,
           Eigen::VectorXcd& b_row, Eigen::VectorXcd& a_out, FieldSolution* record) {
    const double dtau = mesh.dtau();
    const double dz = mesh.dz();
    a_out.resize(mesh.n_tau);
    if (record) {
        record->b.row(0) = b_row.transpose();
    }
    for (int k = 0; k < mesh.n_tau; ++k) {
        cdouble a = a_in(k);
        if (record) {
            record->a(k, 0) = a;
        }
        for (int m = 0; m < mesh.n_z; ++m) {
            Cell::step(g(k, m), dtau, dz, a, b_row(m));
            if (record) {
                record->a(k, m + 1) = a;
            }
        }
        a_out(k) = a;
        if (record) {
            record->b.row(k + 1) = b_row.transpose();
        }
    }
}

void check_finite(const Eigen::VectorXcd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) {
            throw NumericError(std::string("propagator: non-finite ") + what + " at index " +
                                   std::to_string(i),
                               std::numeric_limits<double>::infinity());
        }
    }
}

template <class Cell>
FieldSolution propagate(const ControlField& control, const BoundaryConditions& bc, int n_tau,
                        int n_z) {
    const PropagationMesh mesh = make_mesh(control, n_tau, n_z);
    check_boundary(bc, mesh);
    const Eigen::MatrixXcd g = cell_couplings(control, mesh);
    FieldSolution out;
    out.mesh = mesh;
    out.a.resize(n_tau, n_z + 1);
    out.b.resize(n_tau + 1, n_z);
    Eigen::VectorXcd b_row = bc.b_in;
    Eigen::VectorXcd a_out;
    march<Cell>(g, mesh, bc.a_in, b_row, a_out, &out);
    check_finite(a_out, "A output");
    check_finite(b_row, "B output");
    return out;
}

struct ImpulseResponse {
    Eigen::VectorXcd a_out;
    Eigen::VectorXcd b_out;
};

template <class Cell>
ImpulseResponse respond(const Eigen::MatrixXcd& g, const PropagationMesh& mesh, int index,
                        cdouble value, bool on_signal) {
    Eigen::VectorXcd a_in = Eigen::VectorXcd::Zero(mesh.n_tau);
    Eigen::VectorXcd b_row = Eigen::VectorXcd::Zero(mesh.n_z);
    if (on_signal) {
        a_in(index) = value;
    } else {
        b_row(index) = value;
    }
    ImpulseResponse r;
    march<Cell>(g, mesh, a_in, b_row, r.a_out, nullptr);
    r.b_out = std::move(b_row);
    return r;
}

double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace

Eigen::MatrixXcd FieldSolution::a_centers() const {
    return 0.5 * (a.leftCols(mesh.n_z) + a.rightCols(mesh.n_z));
}

Eigen::MatrixXcd FieldSolution::b_centers() const {
    return 0.5 * (b.topRows(mesh.n_tau) + b.bottomRows(mesh.n_tau));
}

double FieldSolution::a_out_flux() const { return a_out().squaredNorm() * mesh.dtau(); }
double FieldSolution::b_out_flux() const { return b_out().squaredNorm() * mesh.dz(); }
double FieldSolution::a_in_flux() const { return a_in().squaredNorm() * mesh.dtau(); }
double FieldSolution::b_in_flux() const { return b_in().squaredNorm() * mesh.dz(); }

Eigen::MatrixXcd PropagatorMatrices::assemble() const {
    const Eigen::Index na = ca.rows();
    const Eigen::Index nb = cb.rows();
    Eigen::MatrixXcd u(na + nb, na + nb);
    u.topLeftCorner(na, na) = ca;
    u.topRightCorner(na, nb) = sa;
    u.bottomLeftCorner(nb, na) = -sb;
    u.bottomRightCorner(nb, nb) = cb;
    return u;
}

FieldSolution propagate_direct(const ControlField& control, const BoundaryConditions& bc,
                               int n_tau, int n_z) {
    return propagate<MemoryCell>(control, bc, n_tau, n_z);
}

FieldSolution propagate_stokes(const ControlField& control, const BoundaryConditions& bc,
                               int n_tau, int n_z) {
    return propagate<StokesCell>(control, bc, n_tau, n_z);
}

PropagatorMatrices greens_matrices(const ControlField& control, int n_tau, int n_z) {
    const PropagationMesh mesh = make_mesh(control, n_tau, n_z);
    const Eigen::MatrixXcd g = cell_couplings(control, mesh);
    PropagatorMatrices m;
    m.ca.resize(n_tau, n_tau);
    m.sb.resize(n_z, n_tau);
    m.sa.resize(n_tau, n_z);
    m.cb.resize(n_z, n_z);

    // Columns are independent runs; each writes only its own column.
    detail::parallel_for(static_cast<std::size_t>(n_tau + n_z), [&](std::size_t col) {
        const int j = static_cast<int>(col);
        if (j < n_tau) {
            const auto r = respond<MemoryCell>(g, mesh, j, 1.0, true);
            m.ca.col(j) = r.a_out;
            m.sb.col(j) = -r.b_out;
        } else {
            const auto r = respond<MemoryCell>(g, mesh, j - n_tau, 1.0, false);
            m.sa.col(j - n_tau) = r.a_out;
            m.cb.col(j - n_tau) = r.b_out;
        }
    });
    const double ratio = std::sqrt(mesh.dtau() / mesh.dz());
    m.sa *= ratio;
    m.sb /= ratio;
    for (const auto* block : {&m.ca, &m.sa, &m.sb, &m.cb}) {
        if (!block->allFinite()) {
            throw NumericError("greens_matrices: non-finite impulse response",
                               std::numeric_limits<double>::infinity());
        }
    }
    return m;
}

StokesMatrices stokes_greens_matrices(const ControlField& control, int n_tau, int n_z) {
    const PropagationMesh mesh = make_mesh(control, n_tau, n_z);
    const Eigen::MatrixXcd g = cell_couplings(control, mesh);
    const int n = n_tau + n_z;
    StokesMatrices out;
    out.n_signal = n_tau;
    out.c.resize(n, n);
    out.s.resize(n, n);
    const cdouble i_unit(0.0, 1.0);

    detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t col) {
        const int j = static_cast<int>(col);
        const bool on_signal = j < n_tau;
        const int index = on_signal ? j : j - n_tau;
        const auto re = respond<StokesCell>(g, mesh, index, 1.0, on_signal);
        const auto im = respond<StokesCell>(g, mesh, index, i_unit, on_signal);
        Eigen::VectorXcd x_re(n);
        Eigen::VectorXcd x_im(n);
        x_re << re.a_out, re.b_out;
        x_im << im.a_out, im.b_out;
        // X(e) = C e + S e and X(i e) = i C e - i S e.
        out.c.col(j) = 0.5 * (x_re - i_unit * x_im);
        out.s.col(j) = 0.5 * (x_re + i_unit * x_im);
    });

    Eigen::VectorXd scale(n);
    for (int i = 0; i < n; ++i) {
        scale(i) = std::sqrt(i < n_tau ? mesh.dtau() : mesh.dz());
    }
    out.c = scale.asDiagonal() * out.c * scale.cwiseInverse().asDiagonal();
    out.s = scale.asDiagonal() * out.s * scale.cwiseInverse().asDiagonal();
    if (!out.c.allFinite() || !out.s.allFinite()) {
        throw NumericError("stokes_greens_matrices: non-finite impulse response",
                           std::numeric_limits<double>::infinity());
    }
    return out;
}

double check_unitarity(const PropagatorMatrices& m) {
    const auto na = m.ca.rows();
    const auto nb = m.cb.rows();
    if (m.ca.cols() != na || m.cb.cols() != nb || m.sa.rows() != na || m.sa.cols() != nb ||
        m.sb.rows() != nb || m.sb.cols() != na) {
        throw DomainError("check_unitarity: inconsistent block dimensions");
    }
    const Eigen::MatrixXcd u = m.assemble();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return std::max(max_abs(u.adjoint() * u - id), max_abs(u * u.adjoint() - id));
}

double SymplecticResidual::max() const noexcept {
    return std::max({normal, cross, antinormal});
}

SymplecticResidual check_symplectic(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& s,
                                    int n_signal) {
    const auto n = c.rows();
    if (c.cols() != n || s.rows() != n || s.cols() != n) {
        throw DomainError("check_symplectic: C and S must be square and of equal size");
    }
    if (n_signal < 0 || n_signal > n) {
        throw DomainError("check_symplectic: signal block size out of range");
    }
    Eigen::VectorXd zdiag = Eigen::VectorXd::Ones(n);
    zdiag.tail(n - n_signal).setConstant(-1.0);
    const auto z = zdiag.asDiagonal();
    const Eigen::MatrixXcd zmat = zdiag.cast<cdouble>().asDiagonal();

    SymplecticResidual r;
    r.normal = max_abs(c.adjoint() * z * c + s.transpose() * z * s.conjugate() - zmat);
    r.cross = max_abs(c.adjoint() * z * s + s.transpose() * z * c.conjugate());
    r.antinormal = max_abs(c * z * c.adjoint() + s * z * s.adjoint() - zmat);
    return r;
}

void write_field_csv(std::ostream& os, const FieldSolution& solution) {
    const auto a = solution.a_centers();
    const auto b = solution.b_centers();
    const auto& mesh = solution.mesh;
    os << "tau,z,re_A,im_A,re_B,im_B\n";
    for (int k = 0; k < mesh.n_tau; ++k) {
        for (int m = 0; m < mesh.n_z; ++m) {
            os << format_number(mesh.tau_center(k)) << ',' << format_number(mesh.z_center(m))
               << ',' << format_number(a(k, m).real()) << ',' << format_number(a(k, m).imag())
               << ',' << format_number(b(k, m).real()) << ',' << format_number(b(k, m).imag())
               << '\n';
        }
    }
}

} // namespace ramanmem
