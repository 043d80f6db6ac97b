#include "ramanmem/control.hpp"

#include "ramanmem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ramanmem {

ControlField::ControlField(std::vector<cdouble> samples, double duration, double coupling,
                           double kappa)
    : samples_(std::move(samples)), duration_(duration), coupling_(coupling), kappa_(kappa),
      energy_(0.0) {
    if (samples_.size() < 2) {
        throw DomainError("control: need at least two samples");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw DomainError("control: duration must be positive");
    }
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
        throw DomainError("control: coupling must be nonnegative");
    }
    if (!std::isfinite(kappa)) {
        throw DomainError("control: kappa must be finite");
    }
    double peak = 0.0;
    for (const auto& s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("control: non-finite sample");
        }
        peak = std::max(peak, std::abs(s));
    }
    if (peak == 0.0) {
        if (coupling > 0.0) {
            throw DomainError("control: zero envelope with nonzero coupling");
        }
        return;
    }
    for (auto& s : samples_) {
        s /= peak;
    }
    const double h = step();
    for (std::size_t k = 0; k + 1 < samples_.size(); ++k) {
        energy_ += 0.5 * h * (std::norm(samples_[k]) + std::norm(samples_[k + 1]));
    }
}

ControlField ControlField::constant(int n_samples, double duration, double coupling,
                                    double kappa) {
    if (n_samples < 2) {
        throw DomainError("control: need at least two samples");
    }
    return ControlField(std::vector<cdouble>(n_samples, cdouble(1.0, 0.0)), duration, coupling,
                        kappa);
}

ControlField ControlField::gaussian(int n_samples, double duration, double coupling,
                                    double center, double fwhm, double floor, double kappa) {
    if (n_samples < 2) {
        throw DomainError("control: need at least two samples");
    }
    if (!(fwhm > 0.0)) {
        throw DomainError("control: gaussian width must be positive");
    }
    std::vector<cdouble> s(n_samples);
    const double h = duration / (n_samples - 1);
    for (int k = 0; k < n_samples; ++k) {
        const double u = (k * h - center) / fwhm;
        // Intensity FWHM = fwhm, so the amplitude uses half the exponent.
        s[k] = floor + std::exp(-2.0 * std::numbers::ln2 * u * u);
    }
    return ControlField(std::move(s), duration, coupling, kappa);
}

ControlField ControlField::from_intensity(const std::vector<double>& intensity, double duration,
                                          double coupling, double kappa) {
    std::vector<cdouble> s(intensity.size());
    for (std::size_t k = 0; k < intensity.size(); ++k) {
        if (!(intensity[k] >= 0.0)) {
            throw DomainError("control: intensity must be nonnegative");
        }
        s[k] = std::sqrt(intensity[k]);
    }
    return ControlField(std::move(s), duration, coupling, kappa);
}

cdouble ControlField::amplitude(double tau) const {
    if (!(tau >= 0.0) || tau > duration_) {
        return {0.0, 0.0};
    }
    const double t = tau / step();
    const int last = size() - 1;
    const int k = std::min(static_cast<int>(t), last - 1);
    const double frac = t - k;
    return (1.0 - frac) * samples_[k] + frac * samples_[k + 1];
}

double ControlField::intensity(double tau) const {
    if (!(tau >= 0.0) || tau > duration_) {
        return 0.0;
    }
    const double t = tau / step();
    const int last = size() - 1;
    const int k = std::min(static_cast<int>(t), last - 1);
    const double frac = t - k;
    return (1.0 - frac) * std::norm(samples_[k]) + frac * std::norm(samples_[k + 1]);
}

double ControlField::gamma() const noexcept {
    return energy_ > 0.0 ? coupling_ / std::sqrt(energy_) : 0.0;
}

ControlField ControlField::with_coupling(double coupling) const {
    return ControlField(samples_, duration_, coupling, kappa_);
}

ControlField ControlField::with_kappa(double kappa) const {
    return ControlField(samples_, duration_, coupling_, kappa);
}

} // namespace ramanmem
