#include "ramanmem/readout.hpp"

#include "ramanmem/errors.hpp"
#include "ramanmem/types.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ramanmem {
namespace {

void check_positive(double c, double c_r) {
    if (!(c > 0.0) || !(c_r > 0.0)) {
        throw DomainError("readout: couplings must be positive (C=" + std::to_string(c) +
                          ", Cr=" + std::to_string(c_r) + ")");
    }
}

Eigen::VectorXd trapezoid_weights(int m) {
    const double h = 1.0 / (m - 1);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, h);
    w(0) = w(m - 1) = 0.5 * h;
    return w;
}

// Columns u_i(z) = sqrt(Cr) phi^r_i[Cr (1 - z)] on the uniform z mesh,
// Gram-Schmidt orthonormalized under the trapezoid rule.
Eigen::MatrixXd readout_basis(const ModeDecomposition& readout, int n_modes,
                              const Eigen::VectorXd& w) {
    const int m = static_cast<int>(w.size());
    const double cr = readout.c;
    Eigen::MatrixXd u(m, n_modes);
    for (int i = 0; i < n_modes; ++i) {
        for (int k = 0; k < m; ++k) {
            const double z = static_cast<double>(k) / (m - 1);
            u(k, i) = std::sqrt(cr) * readout.mode_value(i, cr * (1.0 - z));
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                const double proj = u.col(j).cwiseProduct(w).dot(u.col(i));
                u.col(i) -= proj * u.col(j);
            }
        }
        const double nrm = std::sqrt(u.col(i).cwiseProduct(w).dot(u.col(i)));
        if (!(nrm > 1e-8)) {
            throw NumericError("readout: mode " + std::to_string(i + 1) +
                                   " is unresolved on the overlap mesh",
                               nrm);
        }
        u.col(i) /= nrm;
    }
    return u;
}

std::vector<double> overlaps_from(const ModeDecomposition& readin,
                                  const ModeDecomposition& readout, int n_modes) {
    const int m = kOverlapMeshPoints;
    const Eigen::VectorXd w = trapezoid_weights(m);
    Eigen::VectorXd v(m);
    for (int k = 0; k < m; ++k) {
        const double z = static_cast<double>(k) / (m - 1);
        v(k) = std::sqrt(readin.c) * readin.mode_value(0, readin.c * z);
    }
    v /= std::sqrt(v.cwiseProduct(w).dot(v));
    const Eigen::MatrixXd u = readout_basis(readout, n_modes, w);
    const Eigen::VectorXd f = u.transpose() * v.cwiseProduct(w);
    return {f.data(), f.data() + f.size()};
}

void check_mode_count(int n_modes, int grid_n) {
    if (n_modes < 1 || n_modes >= grid_n) {
        throw DomainError("readout: mode count " + std::to_string(n_modes) +
                          " must lie in [1, " + std::to_string(grid_n - 1) + "]");
    }
}

} // namespace

ModeCache::ModeCache(int grid_n, int n_modes) : grid_n_(grid_n), n_modes_(n_modes) {
    check_mode_count(n_modes, grid_n);
}

std::shared_ptr<const ModeDecomposition> ModeCache::get(double c) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(c);
        if (it != cache_.end()) {
            return it->second;
        }
    }
    // One extra mode for the truncation tail bound.
    auto decomp = std::make_shared<const ModeDecomposition>(
        solve_modes(make_grid(grid_n_, c), std::min(n_modes_ + 1, grid_n_)));
    std::lock_guard lock(mutex_);
    return cache_.emplace(c, std::move(decomp)).first->second;
}

std::vector<double> overlaps(double c, double c_r, int n_modes, int grid_n) {
    check_positive(c, c_r);
    check_mode_count(n_modes, grid_n);
    const ModeDecomposition readin = solve_modes(make_grid(grid_n, c), 1);
    const ModeDecomposition readout = solve_modes(make_grid(grid_n, c_r), n_modes);
    return overlaps_from(readin, readout, n_modes);
}

RetrievalPoint retrieval_point(double c, double c_r, int n_modes, ModeCache& cache) {
    check_positive(c, c_r);
    if (n_modes > cache.mode_count()) {
        throw DomainError("retrieval_point: cache holds fewer modes than requested");
    }
    const auto readin = cache.get(c);
    const auto readout = cache.get(c_r);
    RetrievalPoint p;
    p.c = c;
    p.c_r = c_r;
    p.overlaps = overlaps_from(*readin, *readout, n_modes);
    p.lambda_r.assign(readout->lambdas.begin(), readout->lambdas.begin() + n_modes);
    p.lambda1 = readin->lambdas[0];
    double captured = 0.0;
    double sum = 0.0;
    for (int i = 0; i < n_modes; ++i) {
        const double f2 = p.overlaps[i] * p.overlaps[i];
        captured += f2;
        sum += p.lambda_r[i] * p.lambda_r[i] * f2;
    }
    p.n = p.lambda1 * p.lambda1 * sum;
    const double next =
        readout->count() > n_modes ? readout->lambdas[n_modes] : 0.0;
    p.tail_bound = next * next * std::max(0.0, 1.0 - captured);
    return p;
}

double retrieval_probability(double c, double c_r, int n_modes, int grid_n) {
    ModeCache cache(grid_n, n_modes);
    return retrieval_point(c, c_r, n_modes, cache).n;
}

std::vector<RetrievalPoint> retrieval_map(std::span<const double> c_values,
                                          std::span<const double> c_r_values, int n_modes,
                                          int grid_n) {
    for (double v : c_values) {
        check_positive(v, 1.0);
    }
    for (double v : c_r_values) {
        check_positive(1.0, v);
    }
    ModeCache cache(grid_n, n_modes);
    const std::size_t ncr = c_r_values.size();
    std::vector<RetrievalPoint> out(c_values.size() * ncr);
    detail::parallel_for(out.size(), [&](std::size_t idx) {
        const double c = c_values[idx / ncr];
        const double cr = c_r_values[idx % ncr];
        try {
            out[idx] = retrieval_point(c, cr, n_modes, cache);
        } catch (const std::exception& e) {
            out[idx].c = c;
            out[idx].c_r = cr;
            out[idx].ok = false;
            out[idx].error = e.what();
        }
    });
    return out;
}

double readout_from_spin_wave(const Eigen::VectorXcd& spin_wave, double c_r, int n_modes,
                              int grid_n) {
    check_positive(1.0, c_r);
    check_mode_count(n_modes, grid_n);
    const int n = static_cast<int>(spin_wave.size());
    if (n < 2) {
        throw DomainError("readout_from_spin_wave: spin wave needs at least two samples");
    }
    const ModeDecomposition readout = solve_modes(make_grid(grid_n, c_r), n_modes);
    const double h = 1.0 / n;
    double total = 0.0;
    for (int i = 0; i < n_modes; ++i) {
        cdouble g = 0.0;
        for (int k = 0; k < n; ++k) {
            const double z = (k + 0.5) * h;
            g += readout.mode_value(i, c_r * (1.0 - z)) * spin_wave(k);
        }
        g *= std::sqrt(c_r) * h;
        total += readout.lambdas[i] * readout.lambdas[i] * std::norm(g);
    }
    return total;
}

} // namespace ramanmem
