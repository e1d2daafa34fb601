#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fanocqed/spectrum.hpp"
#include "fanocqed/system.hpp"

namespace fanocqed {

using complexd = std::complex<double>;

// Single-excitation moments of the dipole-cavity system. Amplitudes are in
// the frame rotating at omega_c; p_c = <a'a>, p_d = <s+s->, x_cross = <a's->.
struct MomentState {
    complexd a_mean{};
    complexd sigma_mean{};
    double p_c = 0.0;
    double p_d = 0.0;
    complexd x_cross{};
};

struct MomentIntegrals {
    double p_c = 0.0;              // integral of p_c dt
    double p_d = 0.0;              // integral of p_d dt
    complexd x_cross{};            // integral of <a's-> dt
};

struct MomentTrajectory {
    std::vector<double> t;
    std::vector<MomentState> states;
    // Time integrals over [0, inf): quadrature over [0, T] plus the exact
    // tail of the linear system beyond the last grid point.
    MomentIntegrals integrals;
    double tail_fraction = 0.0;    // tail contribution relative to p_d integral
    std::size_t solver_steps = 0;
};

// Integrate the equal-time moment equations from the initial condition
// "dipole excited, cavity empty" (p_d = 1, all else 0), sampling the state
// at the requested times. t_grid must be non-negative and increasing.
MomentTrajectory moment_evolution(const SystemParams& params,
                                  std::span<const double> t_grid,
                                  double rtol = 1e-10, double atol = 1e-14);

struct Mat2c {
    complexd a{}, b{}, c{}, d{};  // [[a, b], [c, d]]

    std::array<complexd, 2> apply(const std::array<complexd, 2>& v) const {
        return {a * v[0] + b * v[1], c * v[0] + d * v[1]};
    }
    Mat2c operator*(const Mat2c& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                c * o.b + d * o.d};
    }
};

// exp(M tau) for the quantum-regression drift matrix
//   M = [[-(i w_c + kappa), g], [-g, -(i w_d + gamma_s/2 + gamma_p)]],
// by exact 2x2 eigen-decomposition; the degenerate-eigenvalue case falls
// back to the Jordan-form limit.
Mat2c regression_propagator(const SystemParams& params, double tau);

// exp(A tau) of an arbitrary complex 2x2 matrix (same closed form).
Mat2c expm_2x2(const Mat2c& m, double tau);

// Room-temperature closed forms of the double-transformed two-time
// correlations, with delta = omega - omega_c and omega_d = omega_c:
//   C_cd = 0
//   C_cc = (g^2 / (gamma_p gamma_s kappa)) / (i delta + kappa)
//   C_dd = 1 / (gamma_p gamma_s)
//   C_dc = (g / (gamma_p gamma_s)) / (i delta + kappa)
struct CorrelationSet {
    SystemParams params;

    complexd c_cc(double omega) const;
    complexd c_dd(double omega) const;
    complexd c_cd(double omega) const;
    complexd c_dc(double omega) const;
};

CorrelationSet closed_form_correlations(const SystemParams& params);

struct NumericSpectrumOptions {
    unsigned threads = 1;
};

struct NumericSpectrumResult {
    SpectrumTrace trace;
    double total_emission = 0.0;   // gamma_s * int p_d + 2 kappa * int p_c
};

// Emission spectrum from the quantum-regression machinery. The moment
// system is linear with constant coefficients, so both pieces of the double
// transform are exact: the time integrals of the equal-time moments solve
// A J = -m(0), and the tau-propagation integral of the exact 2x2 matrix
// exponential is the resolvent (i delta - M)^-1. Weights per channel are
// eps_d e^{-i phi_d} sqrt(gamma_s) and eps_c e^{-i phi_c} sqrt(2 kappa); the
// scale convention matches the room-temperature closed form of
// detected_spectrum. The adaptive-ODE route in moment_evolution serves as
// the independent cross-check of the same integrals.
NumericSpectrumResult numeric_spectrum(const SystemParams& params,
                                       const CollectionChannel& channel,
                                       std::span<const double> omega_grid,
                                       const NumericSpectrumOptions& options = {});

}  // namespace fanocqed
