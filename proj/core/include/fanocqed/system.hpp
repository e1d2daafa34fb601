#pragma once

#include <string>

#include "fanocqed/units.hpp"

namespace fanocqed {

// Coupled dipole-cavity rates and carrier frequencies. kappa is the cavity
// field decay rate (energy decay 2*kappa); gamma_s the dipole spontaneous
// emission energy decay rate; gamma_p the pure dephasing rate.
struct SystemParams {
    Rate g;
    Rate kappa;
    Rate gamma_s;
    Rate gamma_p;
    AngularFrequency omega_c;
    AngularFrequency omega_d;

    void validate() const;
};

enum class Polarization { TE, TM };

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

// One whispering-gallery mode record. v_eff_sw is the standing-wave
// effective volume in units of (lambda0/n_disk)^3; the traveling-wave volume
// is twice that. eta_s and eta_nc are local-to-peak electric-field
// energy-density ratios (<= 1) at the disk surface and at the nanocrystal
// center.
struct ModeGeometry {
    Polarization polarization = Polarization::TM;
    int p = 1;          // radial order
    int m = 0;          // azimuthal number
    double lambda0 = 0.0;    // vacuum wavelength, m
    double n_disk = 1.0;
    double v_eff_sw = 0.0;   // standing-wave V_eff, units of (lambda0/n_disk)^3
    double eta_s = 1.0;
    double eta_nc = 1.0;
    double q_rad = 0.0;
    double n_eff = 0.0;

    void validate() const;

    // (lambda0/n_disk)^3 in m^3.
    double unit_volume_m3() const;
    double v_eff_sw_m3() const { return v_eff_sw * unit_volume_m3(); }
    double v_eff_tw_m3() const { return 2.0 * v_eff_sw_m3(); }

    AngularFrequency omega0() const { return wavelength_to_angular(lambda0); }
};

// Sub-wavelength dielectric perturbation sitting on the disk.
struct Scatterer {
    double n_nc = 2.4;        // refractive index (diamond ~ 2.4)
    double v_nc = 0.0;        // physical volume, m^3
    double eta_at_site = 1.0; // local-to-peak energy-density ratio at its center

    void validate() const;
};

// Physical volume of a sphere with the given diameter, m^3.
double sphere_volume(double diameter_m);

// Dipole emitter, e.g. an NV center: total excited-state spontaneous
// emission rate, ZPL branching fraction, emission wavelength, host index.
struct DipoleEmitter {
    Rate gamma_parallel;
    double zpl_fraction = 1.0;
    double lambda_emit = 0.0;  // m
    double n_host = 1.0;

    void validate() const;
};

}  // namespace fanocqed
