#pragma once

#include <stdexcept>

#include "fanocqed/constants.hpp"

namespace fanocqed {

// Angular frequency in rad/s. Public I/O quotes omega/2pi in Hz; storage is
// always angular.
class AngularFrequency {
public:
    AngularFrequency() = default;
    static AngularFrequency from_rad_per_s(double w);
    static AngularFrequency from_hz_over_2pi(double f);

    double rad_per_s() const { return value_; }
    double hz_over_2pi() const { return value_ / two_pi; }

private:
    explicit AngularFrequency(double w) : value_(w) {}
    double value_ = 0.0;
};

// Non-negative angular rate in rad/s (kappa, gamma_s, gamma_p, |beta|, ...).
class Rate {
public:
    Rate() = default;
    static Rate from_rad_per_s(double r);
    static Rate from_hz_over_2pi(double f);

    double rad_per_s() const { return value_; }
    double hz_over_2pi() const { return value_ / two_pi; }

private:
    explicit Rate(double r) : value_(r) {}
    double value_ = 0.0;
};

// lambda -> omega = 2*pi*c/lambda and its inverse.
AngularFrequency wavelength_to_angular(double lambda_m);
double angular_to_wavelength(AngularFrequency omega);

// Q = omega/(2*kappa) with kappa the field decay rate (energy decays at
// 2*kappa), so kappa = omega/(2*Q).
Rate q_to_kappa(double q, AngularFrequency omega);
double kappa_to_q(Rate kappa, AngularFrequency omega);

}  // namespace fanocqed
