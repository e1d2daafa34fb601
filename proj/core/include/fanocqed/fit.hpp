#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fanocqed/spectrum.hpp"

namespace fanocqed {

// Spectrometer line-spread model. fwhm is a wavelength width in meters;
// traces on a detuning axis additionally need lambda_ref to convert it to a
// frequency width via c/lambda^2.
struct InstrumentResponse {
    enum class Kind { none, gaussian };
    Kind kind = Kind::none;
    double fwhm = 0.0;        // m
    double lambda_ref = 0.0;  // m, used for detuning-axis traces

    void validate() const;
};

// Discrete convolution with a normalized Gaussian kernel on the trace's own
// axis. Requires near-uniform sampling; a kernel wider than the trace window
// is rejected. Edge bins renormalize the partial kernel.
SpectrumTrace convolve_response(const SpectrumTrace& trace,
                                const InstrumentResponse& response);

// Free/frozen flag plus box bounds for one scalar in the fit model.
struct FitToggle {
    bool free = false;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

struct ModeToggles {
    FitToggle omega_c;
    FitToggle kappa;
    FitToggle f_o;
    FitToggle eps_c;
    FitToggle phi_c;
};

// Ties mode pairs (2k, 2k+1) into a doublet: shared kappa, fixed splitting
// (odd-member center = even-member center + splitting).
struct DoubletLock {
    bool enabled = false;
    double splitting = 0.0;  // rad/s
};

struct FitProblem {
    SpectrumTrace trace;
    MultiModeModel model;  // initial values
    FitToggle scale;
    FitToggle eps_d;
    FitToggle phi_d;
    std::vector<ModeToggles> mode_toggles;  // one per model mode

    // Smooth background polynomial in the window-normalized abscissa
    // u = (x - x_mid)/x_half; the model intensity is multiplied by it.
    std::vector<double> background{1.0};
    bool background_free = false;

    InstrumentResponse response;
    DoubletLock doublet_lock;

    void validate() const;
};

struct FitOptions {
    int max_iter = 200;
    double tolerance = 1e-10;
    double damping = 1e-3;  // initial Levenberg-Marquardt lambda
};

struct FitParameterValue {
    std::string name;
    double value = 0.0;
    double error = 0.0;  // 1-sigma from the linearized covariance
    bool free = false;
};

struct FitResult {
    std::vector<FitParameterValue> parameters;
    double residual_norm = 0.0;          // ||r||_2 at the optimum
    double initial_residual_norm = 0.0;
    int iterations = 0;
    std::string status;                  // converged | max_iterations | ...
    bool converged = false;

    MultiModeModel model;                // best-fit model
    std::vector<double> background;      // best-fit background coefficients

    double parameter(const std::string& name) const;
    double error_of(const std::string& name) const;
};

// Damped least squares (Levenberg-Marquardt) on the free parameters. kappa,
// F_o and scale iterate in log space; bounds are enforced by projection.
// Deterministic for identical inputs and options.
FitResult fit(const FitProblem& problem, const FitOptions& options = {});

// Model prediction on the problem's grid (multimode x background, then the
// instrument response), for overlays and residual reports.
std::vector<double> predict(const FitProblem& problem,
                            const MultiModeModel& model,
                            const std::vector<double>& background);

struct NoiseSpec {
    enum class Kind { none, multiplicative, additive };
    Kind kind = Kind::none;
    double level = 0.0;
    std::uint64_t seed = 0;
};

struct TraceGrid {
    TraceAxis axis = TraceAxis::detuning_hz;
    double omega_ref = 0.0;
    std::vector<double> abscissa;
};

// Seeded noise on a trace. Bit-reproducible for a given seed (the Gaussian
// deviates come from a fixed Box-Muller over std::mt19937_64).
SpectrumTrace apply_noise(SpectrumTrace trace, const NoiseSpec& noise);

// Synthetic trace: model x background, convolved, with seeded noise.
SpectrumTrace synthesize(const MultiModeModel& model,
                         const std::vector<double>& background,
                         const InstrumentResponse& response,
                         const NoiseSpec& noise, const TraceGrid& grid);

// Rough initial guess for a single resonance: strongest deviation from the
// median level, with a half-width estimate.
struct ExtremumSeed {
    double center = 0.0;  // axis units
    double width = 0.0;   // axis units, FWHM-like
    bool is_peak = true;
};
ExtremumSeed seed_from_extremum(const SpectrumTrace& trace);

}  // namespace fanocqed
