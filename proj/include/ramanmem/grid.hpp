#pragma once

#include <vector>

namespace ramanmem {

/// Uniform midpoint quadrature on [0, c]. Nodes avoid both endpoints.
class Grid {
public:
    Grid(int n, double c);

    int size() const noexcept { return n_; }
    double coupling() const noexcept { return c_; }
    double spacing() const noexcept { return c_ / n_; }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double node(int i) const { return nodes_[i]; }
    double weight(int i) const { return weights_[i]; }

private:
    int n_;
    double c_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Builds the midpoint grid; throws DomainError for n < 1 or c <= 0.
Grid make_grid(int n, double c);

/// Bessel function of the first kind, orders 0 and 1, for x >= 0.
double bessel_j(int order, double x);

/// Argument at which bessel_j switches from the power series to the
/// large-argument expansion.
inline constexpr double kBesselSeam = 16.0;

} // namespace ramanmem
