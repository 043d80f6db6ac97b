#pragma once

#include <stdexcept>
#include <string>

namespace ramanmem {

/// Invalid argument or configuration: a precondition was violated.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed; carries the residual that triggered it.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The requested wavepacket cannot be matched by the dominant memory mode.
class UnreachableShapeError : public NumericError {
public:
    UnreachableShapeError(const std::string& what, double best_overlap)
        : NumericError(what, 1.0 - best_overlap), best_overlap_(best_overlap) {}

    double best_overlap() const noexcept { return best_overlap_; }

private:
    double best_overlap_;
};

} // namespace ramanmem
