#include "ramanmem/grid.hpp"

#include "ramanmem/errors.hpp"

#include <cmath>
#include <string>

namespace ramanmem {

Grid::Grid(int n, double c) : n_(n), c_(c) {
    if (n < 1) {
        throw DomainError("grid: node count must be positive, got " + std::to_string(n));
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("grid: coupling must be positive and finite, got " +
                          std::to_string(c));
    }
    const double h = c / n;
    nodes_.resize(n);
    weights_.assign(n, h);
    for (int i = 0; i < n; ++i) {
        nodes_[i] = (i + 0.5) * h;
    }
}

Grid make_grid(int n, double c) {
    return Grid(n, c);
}

} // namespace ramanmem
