#include "ramanmem/errors.hpp"
#include "ramanmem/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ramanmem {
namespace {

// Ascending series sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!). Below the seam
// the largest term is ~1e5, so extended precision keeps the cancellation
// error near 1e-14.
double series(int order, double x) {
    const long double h = 0.5L * x;
    const long double h2 = h * h;
    long double term = order == 0 ? 1.0L : h;
    long double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -h2 / (static_cast<long double>(k) * (k + order));
        sum += term;
        if (std::fabs(term) <= 1e-21L * std::fabs(sum)) {
            break;
        }
    }
    return static_cast<double>(sum);
}

// Hankel expansion J_n(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
// truncated at the smallest term.
double asymptotic(int order, double x) {
    const double mu = 4.0 * order * order;
    double p = 0.0;
    double q = 0.0;
    double term = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 80; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            term *= (mu - odd * odd) / (8.0 * k * x);
        }
        const double magnitude = std::fabs(term);
        if (magnitude > previous) {
            break;
        }
        previous = magnitude;
        switch (k % 4) {
        case 0: p += term; break;
        case 1: q += term; break;
        case 2: p -= term; break;
        default: q -= term; break;
        }
        if (magnitude < 1e-17) {
            break;
        }
    }
    const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

double bessel_j(int order, double x) {
    if (order != 0 && order != 1) {
        throw DomainError("bessel_j: only orders 0 and 1 are supported, got " +
                          std::to_string(order));
    }
    if (!(x >= 0.0)) {
        throw DomainError("bessel_j: argument must be nonnegative");
    }
    return x < kBesselSeam ? series(order, x) : asymptotic(order, x);
}

} // namespace ramanmem
