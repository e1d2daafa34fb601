#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "fanocqed/system.hpp"
#include "fanocqed/units.hpp"

namespace fanocqed {

// One sample of a cavity mode field on a discretized grid.
struct FieldSample {
    std::array<double, 3> position{};          // m
    double n = 1.0;                            // local refractive index
    std::array<std::complex<double>, 3> e{};   // complex field vector
    double cell_volume = 0.0;                  // m^3

    // n^2 |E|^2 at this sample.
    double energy_density() const;
};

struct SampledField {
    std::vector<FieldSample> samples;

    void validate() const;

    // CSV columns: x,y,z,n,re_ex,im_ex,re_ey,im_ey,re_ez,im_ez,cell_volume.
    // '#'-prefixed lines are comments.
    static SampledField from_csv(std::istream& in);
    static SampledField from_csv_file(const std::string& path);
};

// Integral of n^2|E|^2 dV divided by its peak density: the energy-normalized
// mode volume, m^3. Invariant under global rescaling of E.
double effective_mode_volume(const SampledField& field);

// Local-to-peak energy-density ratio at the given sample, in (0,1].
// A zero-field site is rejected.
double eta_ratio(const SampledField& field, std::size_t sample_index);

// Position-based lookup; the site must match a sample position within
// rel_tol of the typical cell size.
double eta_ratio_at(const SampledField& field,
                    const std::array<double, 3>& site, double rel_tol = 1e-9);

// Per-photon field amplitude at a site with local-to-peak ratio eta_site and
// local index n_site: sqrt(hbar*omega*eta_site / (2*eps0*n_site^2*V_eff)).
// Uses the standing-wave effective volume.
double photon_field(const ModeGeometry& mode, double eta_site, double n_site);
double photon_field(AngularFrequency omega, double v_eff_m3, double eta_site,
                    double n_site);

// Transition dipole moment magnitude from the bulk spontaneous emission
// rate: |mu|^2 = 3*pi^2*hbar*eps0*c^3*gamma_par / (n_host*omega^3), C*m.
double dipole_moment(const DipoleEmitter& emitter);

// Coherent coupling rate g = |mu| * E_photon / hbar, with an optional
// orientation factor (cosine between dipole and field; 1 = aligned).
Rate coupling_rate(const DipoleEmitter& emitter, const ModeGeometry& mode,
                   double eta_site, double n_site, double alignment = 1.0);

// Rate into the ZPL alone: g * sqrt(zpl_fraction).
Rate zpl_coupling_rate(const DipoleEmitter& emitter, const ModeGeometry& mode,
                       double eta_site, double n_site, double alignment = 1.0);

// Bad-cavity Purcell factor F_o = 2 g^2 / (kappa * gamma_s) and its inverse.
double purcell_factor(Rate g, Rate kappa, Rate gamma_s);
Rate g_from_purcell(double f_o, Rate kappa, Rate gamma_s);

}  // namespace fanocqed
