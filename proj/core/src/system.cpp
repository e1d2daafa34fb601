#include "fanocqed/system.hpp"

#include <cmath>
#include <stdexcept>

namespace fanocqed {

void SystemParams::validate() const {
    if (!(omega_c.rad_per_s() > 0.0) || !(omega_d.rad_per_s() > 0.0))
        throw std::invalid_argument("carrier frequencies must be > 0");
    // Rate construction already enforces >= 0.
}

std::string to_string(Polarization p) {
    return p == Polarization::TE ? "TE" : "TM";
}

Polarization polarization_from_string(const std::string& s) {
    if (s == "TE") return Polarization::TE;
    if (s == "TM") return Polarization::TM;
    throw std::invalid_argument("polarization must be \"TE\" or \"TM\"");
}

void ModeGeometry::validate() const {
    if (p < 1) throw std::invalid_argument("radial order p must be >= 1");
    if (!(lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be > 0");
    if (!(n_disk > 1.0)) throw std::invalid_argument("n_disk must be > 1");
    if (!(v_eff_sw > 0.0)) throw std::invalid_argument("v_eff_sw must be > 0");
    if (!(eta_nc > 0.0) || !(eta_s > 0.0) || eta_s > 1.0 || eta_nc > eta_s)
        throw std::invalid_argument(
            "eta ratios must satisfy 0 < eta_nc <= eta_s <= 1");
    if (q_rad < 0.0) throw std::invalid_argument("q_rad must be >= 0");
}

double ModeGeometry::unit_volume_m3() const {
    const double u = lambda0 / n_disk;
    return u * u * u;
}

void Scatterer::validate() const {
    if (!(n_nc > 1.0)) throw std::invalid_argument("n_nc must be > 1");
    if (!(v_nc > 0.0)) throw std::invalid_argument("v_nc must be > 0");
    if (!(eta_at_site > 0.0) || eta_at_site > 1.0)
        throw std::invalid_argument("eta_at_site must be in (0,1]");
}

double sphere_volume(double diameter_m) {
    if (!(diameter_m > 0.0))
        throw std::invalid_argument("diameter must be > 0");
    const double r = 0.5 * diameter_m;
    return 4.0 / 3.0 * pi * r * r * r;
}

void DipoleEmitter::validate() const {
    if (!(gamma_parallel.rad_per_s() > 0.0))
        throw std::invalid_argument("gamma_parallel must be > 0");
    if (zpl_fraction < 0.0 || zpl_fraction > 1.0)
        throw std::invalid_argument("zpl_fraction must be in [0,1]");
    if (!(lambda_emit > 0.0))
        throw std::invalid_argument("lambda_emit must be > 0");
    if (!(n_host >= 1.0)) throw std::invalid_argument("n_host must be >= 1");
}

}  // namespace fanocqed
