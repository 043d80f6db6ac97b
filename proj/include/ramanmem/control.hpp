#pragma once

#include "ramanmem/types.hpp"

#include <vector>

namespace ramanmem {

/// Classical control envelope sampled on nodes tau_k = k T / (N - 1).
///
/// Samples are rescaled so that max |eps| = 1. The coupling C folds the
/// envelope energy E = int |eps|^2 dtau in, so the physical coupling rate is
/// gamma = C / sqrt(E) for a unit-length medium.
class ControlField {
public:
    ControlField(std::vector<cdouble> samples, double duration, double coupling,
                 double kappa = 0.0);

    static ControlField constant(int n_samples, double duration, double coupling,
                                 double kappa = 0.0);
    /// Intensity profile exp(-4 ln2 ((tau - center)/fwhm)^2), plus a floor.
    static ControlField gaussian(int n_samples, double duration, double coupling,
                                 double center, double fwhm, double floor = 0.0,
                                 double kappa = 0.0);
    /// Real nonnegative amplitude from intensity samples.
    static ControlField from_intensity(const std::vector<double>& intensity,
                                       double duration, double coupling,
                                       double kappa = 0.0);

    const std::vector<cdouble>& samples() const noexcept { return samples_; }
    int size() const noexcept { return static_cast<int>(samples_.size()); }
    double duration() const noexcept { return duration_; }
    double coupling() const noexcept { return coupling_; }
    double kappa() const noexcept { return kappa_; }
    double step() const noexcept { return duration_ / (samples_.size() - 1); }
    double node(int k) const noexcept { return k * step(); }

    /// Linear interpolation of the complex samples; zero outside [0, T].
    cdouble amplitude(double tau) const;
    /// Linear interpolation of |eps|^2; zero outside [0, T].
    double intensity(double tau) const;

    /// Trapezoid integral of |eps|^2 over the samples.
    double energy() const noexcept { return energy_; }
    double gamma() const noexcept;

    ControlField with_coupling(double coupling) const;
    ControlField with_kappa(double kappa) const;

private:
    std::vector<cdouble> samples_;
    double duration_;
    double coupling_;
    double kappa_;
    double energy_;
};

} // namespace ramanmem
