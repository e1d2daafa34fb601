#include "fanocqed/units.hpp"

namespace fanocqed {

AngularFrequency AngularFrequency::from_rad_per_s(double w) {
    return AngularFrequency(w);
}

AngularFrequency AngularFrequency::from_hz_over_2pi(double f) {
    return AngularFrequency(f * two_pi);
}

Rate Rate::from_rad_per_s(double r) {
    if (r < 0.0) throw std::invalid_argument("Rate must be >= 0");
    return Rate(r);
}

Rate Rate::from_hz_over_2pi(double f) {
    return from_rad_per_s(f * two_pi);
}

AngularFrequency wavelength_to_angular(double lambda_m) {
    if (!(lambda_m > 0.0))
        throw std::invalid_argument("wavelength must be > 0");
    return AngularFrequency::from_rad_per_s(two_pi * c_light / lambda_m);
}

double angular_to_wavelength(AngularFrequency omega) {
    if (!(omega.rad_per_s() > 0.0))
        throw std::invalid_argument("angular frequency must be > 0");
    return two_pi * c_light / omega.rad_per_s();
}

Rate q_to_kappa(double q, AngularFrequency omega) {
    if (!(q > 0.0)) throw std::invalid_argument("Q must be > 0");
    if (!(omega.rad_per_s() > 0.0))
        throw std::invalid_argument("angular frequency must be > 0");
    return Rate::from_rad_per_s(omega.rad_per_s() / (2.0 * q));
}

double kappa_to_q(Rate kappa, AngularFrequency omega) {
    if (!(kappa.rad_per_s() > 0.0))
        throw std::invalid_argument("kappa must be > 0");
    if (!(omega.rad_per_s() > 0.0))
        throw std::invalid_argument("angular frequency must be > 0");
    return omega.rad_per_s() / (2.0 * kappa.rad_per_s());
}

}  // namespace fanocqed
