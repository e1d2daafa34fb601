#pragma once

#include <span>

#include "fanocqed/spectrum.hpp"
#include "fanocqed/system.hpp"
#include "fanocqed/units.hpp"

namespace fanocqed {

// Coupled-mode backscattering result for a point scatterer on a WGM:
// standing-wave doublet at omega0 -/+ |beta| with normalized splitting
// 1/Q_beta = 2|beta|/omega0.
struct BackscatterResult {
    Rate beta_mag;               // |beta|
    double xi = 0.0;             // phase of beta = |beta| e^{i xi}
    double q_beta = 0.0;         // omega0 / (2 |beta|)
    AngularFrequency omega_minus;
    AngularFrequency omega_plus;
    bool sub_wavelength = true;  // v_nc^(1/3) < lambda0/n_nc held

    double normalized_splitting() const { return 1.0 / q_beta; }
};

// Point-scatterer reduction of the traveling-wave coupled-mode equations:
//   2|beta|/omega0 = (n_nc^2 - 1) V_nc eta_at_site / V_tw_eff
// with V_tw_eff the traveling-wave effective volume (twice the stored
// standing-wave value). xi defaults to 0: the scatterer azimuth defines the
// phase origin and only |beta| is observable in the splitting.
BackscatterResult backscatter(const ModeGeometry& mode, const Scatterer& sc,
                              double xi = 0.0);

// Scattering-limited quality factor of the mode:
//   Q_s = 3 lambda0^3 (1/eta_at_site) V_eff / (4 pi^2 (n_nc^2-1)^2 V_nc^2)
// with V_eff the standing-wave volume in m^3.
double scattering_q(const ModeGeometry& mode, const Scatterer& sc);

// Cycle-averaged power radiated by the polarization current the cavity field
// induces in the scatterer; solid-angle integral of the dipole pattern is
// 8 pi / 3.
double radiated_power(double e_field_at_site, const Scatterer& sc,
                      AngularFrequency omega);

// Loaded quality factors of the standing-wave doublet. The lower-frequency
// mode locks its antinode to the scatterer and takes the full scattering
// loss; the higher-frequency (node-locked) mode takes node_residual of it.
struct DoubletLoss {
    double q_low = 0.0;
    double q_high = 0.0;
};

DoubletLoss doublet_loss(double q_intrinsic, double q_s_antinode,
                         double node_residual = 0.0);

// Convenience form: Q_s at the antinode is half the traveling-wave
// scattering_q (the standing-wave antinode energy density is twice the
// traveling-wave local density).
DoubletLoss doublet_loss(double q_intrinsic, const ModeGeometry& mode,
                         const Scatterer& sc, double node_residual = 0.0);

// Two-dip Lorentzian taper transmission:
//   T(w) = 1 - sum_{+-} d_{+-} / (1 + 4 Q_{+-}^2 (w/w_{+-} - 1)^2).
SpectrumTrace doublet_transmission(std::span<const double> omega_grid,
                                   AngularFrequency omega_minus,
                                   AngularFrequency omega_plus, double q_low,
                                   double q_high, double depth_minus,
                                   double depth_plus, double omega_ref = 0.0);

}  // namespace fanocqed
