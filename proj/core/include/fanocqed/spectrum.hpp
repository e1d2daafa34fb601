#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fanocqed/system.hpp"
#include "fanocqed/units.hpp"

namespace fanocqed {

enum class TraceAxis { detuning_hz, wavelength_nm };

std::string to_string(TraceAxis a);
TraceAxis axis_from_string(const std::string& s);

// Sampled intensity versus wavelength or detuning. Detuning axes are
// (omega - omega_ref)/2pi in Hz with omega_ref recorded alongside
// (omega_ref = 0 means the abscissa is an absolute frequency).
struct SpectrumTrace {
    TraceAxis axis = TraceAxis::detuning_hz;
    double omega_ref = 0.0;  // rad/s, used by detuning axes
    std::vector<double> abscissa;
    std::vector<double> intensity;
    std::vector<double> uncertainty;  // empty, or one entry per point

    std::size_t size() const { return abscissa.size(); }
    void validate() const;

    // Absolute angular frequency of point i, rad/s.
    double omega_at(std::size_t i) const;
};

std::vector<double> linspace(double a, double b, std::size_t n);

// Overlap amplitudes and phases of the collection optic with the dipole and
// cavity radiation channels.
struct CollectionChannel {
    double eps_d = 0.0;
    double eps_c = 0.0;
    double phi_d = 0.0;
    double phi_c = 0.0;

    void validate() const;
};

// Room-temperature detected spectrum for an arbitrary collection channel:
//   S(w) = (1/gamma_p) |eps_d e^{-i phi_d}
//           + eps_c e^{-i phi_c} sqrt(2 g^2/(kappa gamma_s)) / (1 + i dw/kappa)|^2
// with dw = w - omega_c. Returned on a detuning axis about omega_c.
SpectrumTrace detected_spectrum(const SystemParams& params,
                                const CollectionChannel& channel,
                                std::span<const double> omega_grid);
double detected_spectrum_at(const SystemParams& params,
                            const CollectionChannel& channel, double omega);

// Lens-collected Fano lineshape, background normalized to 1:
//   S = |1 + i sqrt(F_o) / (1 + i dw/kappa)|^2.
// The grid is detuning from the cavity resonance, rad/s.
SpectrumTrace lens_spectrum(double f_o, Rate kappa,
                            std::span<const double> detuning_grid);
double lens_spectrum_at(double f_o, Rate kappa, double detuning);

// Detunings (units of kappa) of the lens lineshape maximum and minimum, and
// the point where it crosses the background: roots of x^2 + sqrt(F) x - 1.
struct LensExtrema {
    double x_max;
    double x_min;
    double x_cross;
};
LensExtrema lens_extrema(double f_o);

// One decoupled cavity mode of the multi-mode generalization.
struct CavityModeTerm {
    AngularFrequency omega_c;
    Rate kappa;
    double f_o = 0.0;
    double eps_c = 1.0;
    double phi_c = 0.0;
};

struct MultiModeModel {
    std::vector<CavityModeTerm> modes;
    double eps_d = 1.0;
    double phi_d = 0.0;
    double scale = 1.0;

    void validate() const;

    std::complex<double> amplitude(double omega) const;
    double intensity(double omega) const;
};

// Coherent multi-mode sum on an absolute angular-frequency grid; the trace
// abscissa is (omega - omega_ref)/2pi.
SpectrumTrace multimode_spectrum(const MultiModeModel& model,
                                 std::span<const double> omega_grid,
                                 double omega_ref = 0.0);

// Same model evaluated on a wavelength grid (nm).
SpectrumTrace multimode_spectrum_wavelength(const MultiModeModel& model,
                                            std::span<const double> lambda_nm);

struct DropFilterMode {
    AngularFrequency omega_c;
    Rate kappa;
    double depth = 0.0;  // in [0,1]
};

// Waveguide transmission past side-coupled modes: Lorentzian dips with no
// interference, background * prod_k (1 - d_k / (1 + (dw_k/kappa_k)^2)).
SpectrumTrace drop_filter_spectrum(const std::vector<DropFilterMode>& modes,
                                   std::span<const double> omega_grid,
                                   double background = 1.0,
                                   double omega_ref = 0.0);

// Complex ratio of indirect (via-cavity) to direct radiation amplitudes for
// a source at omega_s driving a cavity at omega_c:
//   ratio = (|s_c|/4) i omega_c |kappa_c| / [ (|s_s|/2) (i(omega_c - omega_s) + kappa) ].
// On resonance its phase is pi/2.
std::complex<double> phase_lag(AngularFrequency omega_s,
                               AngularFrequency omega_c, Rate kappa,
                               double s_s_mag = 1.0, double s_c_mag = 1.0,
                               double kappa_c_mag = 1.0);

}  // namespace fanocqed
