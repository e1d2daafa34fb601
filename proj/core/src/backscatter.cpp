#include "fanocqed/backscatter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fanocqed/constants.hpp"

namespace fanocqed {

BackscatterResult backscatter(const ModeGeometry& mode, const Scatterer& sc,
                              double xi) {
    mode.validate();
    sc.validate();
    const double v_tw = mode.v_eff_tw_m3();
    if (!(v_tw > 0.0)) throw std::invalid_argument("mode volume must be > 0");

    const double contrast = sc.n_nc * sc.n_nc - 1.0;
    const double inv_q_beta = contrast * sc.v_nc * sc.eta_at_site / v_tw;

    const double w0 = mode.omega0().rad_per_s();
    const double beta = 0.5 * inv_q_beta * w0;

    BackscatterResult result;
    result.beta_mag = Rate::from_rad_per_s(beta);
    result.xi = xi;
    result.q_beta = 1.0 / inv_q_beta;
    result.omega_minus = AngularFrequency::from_rad_per_s(w0 - beta);
    result.omega_plus = AngularFrequency::from_rad_per_s(w0 + beta);
    result.sub_wavelength = std::cbrt(sc.v_nc) < mode.lambda0 / sc.n_nc;
    return result;
}

double scattering_q(const ModeGeometry& mode, const Scatterer& sc) {
    mode.validate();
    sc.validate();
    const double lam3 = mode.lambda0 * mode.lambda0 * mode.lambda0;
    const double contrast = sc.n_nc * sc.n_nc - 1.0;
    const double denom =
        4.0 * pi * pi * contrast * contrast * sc.v_nc * sc.v_nc;
    const double q =
        3.0 * lam3 * mode.v_eff_sw_m3() / (sc.eta_at_site * denom);
    if (!std::isfinite(q)) return std::numeric_limits<double>::infinity();
    return q;
}

double radiated_power(double e_field_at_site, const Scatterer& sc,
                      AngularFrequency omega) {
    sc.validate();
    const double w = omega.rad_per_s();
    if (!(w > 0.0)) throw std::invalid_argument("omega must be > 0");
    const double k0 = w / c_light;
    const double contrast = sc.n_nc * sc.n_nc - 1.0;
    const double e2 = e_field_at_site * e_field_at_site;
    // omega k0^3 (n^2-1)^2 V^2 eps0 |E|^2 / (32 pi^2) * (8 pi / 3)
    return w * k0 * k0 * k0 * contrast * contrast * sc.v_nc * sc.v_nc * eps0 *
           e2 / (12.0 * pi);
}

DoubletLoss doublet_loss(double q_intrinsic, double q_s_antinode,
                         double node_residual) {
    if (!(q_intrinsic > 0.0))
        throw std::invalid_argument("q_intrinsic must be > 0");
    if (!(q_s_antinode > 0.0))
        throw std::invalid_argument("q_s_antinode must be > 0");
    if (node_residual < 0.0)
        throw std::invalid_argument("node_residual must be >= 0");
    DoubletLoss dl;
    if (std::isinf(q_s_antinode)) {
        dl.q_low = q_intrinsic;
        dl.q_high = q_intrinsic;
        return dl;
    }
    dl.q_low = 1.0 / (1.0 / q_intrinsic + 1.0 / q_s_antinode);
    dl.q_high = 1.0 / (1.0 / q_intrinsic + node_residual / q_s_antinode);
    return dl;
}

DoubletLoss doublet_loss(double q_intrinsic, const ModeGeometry& mode,
                         const Scatterer& sc, double node_residual) {
    return doublet_loss(q_intrinsic, 0.5 * scattering_q(mode, sc),
                        node_residual);
}

SpectrumTrace doublet_transmission(std::span<const double> omega_grid,
                                   AngularFrequency omega_minus,
                                   AngularFrequency omega_plus, double q_low,
                                   double q_high, double depth_minus,
                                   double depth_plus, double omega_ref) {
    if (depth_minus < 0.0 || depth_minus > 1.0 || depth_plus < 0.0 ||
        depth_plus > 1.0)
        throw std::invalid_argument("coupling depths must be in [0,1]");
    if (!(q_low > 0.0) || !(q_high > 0.0))
        throw std::invalid_argument("quality factors must be > 0");

    const double wm = omega_minus.rad_per_s();
    const double wp = omega_plus.rad_per_s();
    SpectrumTrace trace;
    trace.axis = TraceAxis::detuning_hz;
    trace.omega_ref = omega_ref;
    trace.abscissa.reserve(omega_grid.size());
    trace.intensity.reserve(omega_grid.size());
    for (double w : omega_grid) {
        const double xm = 2.0 * q_low * (w / wm - 1.0);
        const double xp = 2.0 * q_high * (w / wp - 1.0);
        const double t = 1.0 - depth_minus / (1.0 + xm * xm) -
                         depth_plus / (1.0 + xp * xp);
        trace.abscissa.push_back((w - omega_ref) / two_pi);
        trace.intensity.push_back(t);
    }
    trace.validate();
    return trace;
}

}  // namespace fanocqed
