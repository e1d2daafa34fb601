#include "fanocqed/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include "fanocqed/constants.hpp"

namespace fanocqed {

std::string to_string(TraceAxis a) {
    return a == TraceAxis::detuning_hz ? "detuning_hz" : "wavelength_nm";
}

TraceAxis axis_from_string(const std::string& s) {
    if (s == "detuning_hz") return TraceAxis::detuning_hz;
    if (s == "wavelength_nm") return TraceAxis::wavelength_nm;
    throw std::invalid_argument("axis must be detuning_hz or wavelength_nm");
}

void SpectrumTrace::validate() const {
    if (abscissa.size() != intensity.size())
        throw std::invalid_argument("abscissa/intensity size mismatch");
    if (!uncertainty.empty() && uncertainty.size() != abscissa.size())
        throw std::invalid_argument("uncertainty size mismatch");
    if (abscissa.size() < 2)
        throw std::invalid_argument("trace needs at least two points");
    const bool increasing = abscissa[1] > abscissa[0];
    for (std::size_t i = 1; i < abscissa.size(); ++i) {
        const double d = abscissa[i] - abscissa[i - 1];
        if ((increasing && !(d > 0.0)) || (!increasing && !(d < 0.0)))
            throw std::invalid_argument("abscissa must be strictly monotone");
    }
    for (double v : intensity)
        if (!std::isfinite(v))
            throw std::invalid_argument("intensities must be finite");
}

double SpectrumTrace::omega_at(std::size_t i) const {
    if (axis == TraceAxis::wavelength_nm)
        return two_pi * c_light / (abscissa[i] * 1e-9);
    return omega_ref + two_pi * abscissa[i];
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linspace needs n >= 2");
    std::vector<double> v(n);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + step * static_cast<double>(i);
    v.back() = b;
    return v;
}

void CollectionChannel::validate() const {
    if (eps_d < 0.0 || eps_c < 0.0)
        throw std::invalid_argument("overlap amplitudes must be >= 0");
    if (eps_d == 0.0 && eps_c == 0.0)
        throw std::invalid_argument("channel must couple to at least one field");
}

double detected_spectrum_at(const SystemParams& params,
                            const CollectionChannel& channel, double omega) {
    using namespace std::complex_literals;
    const double kappa = params.kappa.rad_per_s();
    const double gamma_s = params.gamma_s.rad_per_s();
    const double gamma_p = params.gamma_p.rad_per_s();
    const double g = params.g.rad_per_s();
    const double dw = omega - params.omega_c.rad_per_s();

    std::complex<double> amp =
        channel.eps_d * std::exp(-1.0i * channel.phi_d);
    if (channel.eps_c > 0.0 && g > 0.0) {
        const double fano_amp = std::sqrt(2.0 * g * g / (kappa * gamma_s));
        amp += channel.eps_c * std::exp(-1.0i * channel.phi_c) * fano_amp /
               (1.0 + 1.0i * dw / kappa);
    }
    return std::norm(amp) / gamma_p;
}

SpectrumTrace detected_spectrum(const SystemParams& params,
                                const CollectionChannel& channel,
                                std::span<const double> omega_grid) {
    params.validate();
    channel.validate();
    if (!(params.gamma_p.rad_per_s() > 0.0))
        throw std::invalid_argument("gamma_p must be > 0");
    if (channel.eps_c > 0.0 && params.g.rad_per_s() > 0.0) {
        if (!(params.kappa.rad_per_s() > 0.0) ||
            !(params.gamma_s.rad_per_s() > 0.0))
            throw std::invalid_argument(
                "cavity channel requires kappa > 0 and gamma_s > 0");
    }
    SpectrumTrace trace;
    trace.axis = TraceAxis::detuning_hz;
    trace.omega_ref = params.omega_c.rad_per_s();
    trace.abscissa.reserve(omega_grid.size());
    trace.intensity.reserve(omega_grid.size());
    for (double w : omega_grid) {
        trace.abscissa.push_back((w - trace.omega_ref) / two_pi);
        trace.intensity.push_back(detected_spectrum_at(params, channel, w));
    }
    trace.validate();
    return trace;
}

double lens_spectrum_at(double f_o, Rate kappa, double detuning) {
    using namespace std::complex_literals;
    const std::complex<double> amp =
        1.0 + 1.0i * std::sqrt(f_o) /
                  (1.0 + 1.0i * detuning / kappa.rad_per_s());
    return std::norm(amp);
}

SpectrumTrace lens_spectrum(double f_o, Rate kappa,
                            std::span<const double> detuning_grid) {
    if (f_o < 0.0) throw std::invalid_argument("F_o must be >= 0");
    if (!(kappa.rad_per_s() > 0.0))
        throw std::invalid_argument("kappa must be > 0");
    SpectrumTrace trace;
    trace.axis = TraceAxis::detuning_hz;
    trace.omega_ref = 0.0;
    trace.abscissa.reserve(detuning_grid.size());
    trace.intensity.reserve(detuning_grid.size());
    for (double dw : detuning_grid) {
        trace.abscissa.push_back(dw / two_pi);
        trace.intensity.push_back(lens_spectrum_at(f_o, kappa, dw));
    }
    trace.validate();
    return trace;
}

LensExtrema lens_extrema(double f_o) {
    if (!(f_o > 0.0)) throw std::invalid_argument("F_o must be > 0");
    const double s = std::sqrt(f_o);
    const double disc = std::sqrt(f_o + 4.0);
    return LensExtrema{(-s + disc) / 2.0, (-s - disc) / 2.0, -s / 2.0};
}

void MultiModeModel::validate() const {
    if (eps_d < 0.0) throw std::invalid_argument("eps_d must be >= 0");
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be > 0");
    for (const auto& m : modes) {
        if (!(m.kappa.rad_per_s() > 0.0))
            throw std::invalid_argument("mode kappa must be > 0");
        if (m.f_o < 0.0) throw std::invalid_argument("mode F_o must be >= 0");
        if (m.eps_c < 0.0) throw std::invalid_argument("eps_c must be >= 0");
    }
}

std::complex<double> MultiModeModel::amplitude(double omega) const {
    using namespace std::complex_literals;
    std::complex<double> amp = eps_d * std::exp(-1.0i * phi_d);
    for (const auto& m : modes) {
        const double dw = omega - m.omega_c.rad_per_s();
        amp += m.eps_c * std::exp(-1.0i * m.phi_c) * std::sqrt(m.f_o) /
               (1.0 + 1.0i * dw / m.kappa.rad_per_s());
    }
    return amp;
}

double MultiModeModel::intensity(double omega) const {
    return scale * std::norm(amplitude(omega));
}

SpectrumTrace multimode_spectrum(const MultiModeModel& model,
                                 std::span<const double> omega_grid,
                                 double omega_ref) {
    model.validate();
    SpectrumTrace trace;
    trace.axis = TraceAxis::detuning_hz;
    trace.omega_ref = omega_ref;
    trace.abscissa.reserve(omega_grid.size());
    trace.intensity.reserve(omega_grid.size());
    for (double w : omega_grid) {
        trace.abscissa.push_back((w - omega_ref) / two_pi);
        trace.intensity.push_back(model.intensity(w));
    }
    trace.validate();
    return trace;
}

SpectrumTrace multimode_spectrum_wavelength(const MultiModeModel& model,
                                            std::span<const double> lambda_nm) {
    model.validate();
    SpectrumTrace trace;
    trace.axis = TraceAxis::wavelength_nm;
    trace.abscissa.assign(lambda_nm.begin(), lambda_nm.end());
    trace.intensity.reserve(lambda_nm.size());
    for (double lam : lambda_nm) {
        if (!(lam > 0.0))
            throw std::invalid_argument("wavelengths must be > 0");
        trace.intensity.push_back(
            model.intensity(two_pi * c_light / (lam * 1e-9)));
    }
    trace.validate();
    return trace;
}

SpectrumTrace drop_filter_spectrum(const std::vector<DropFilterMode>& modes,
                                   std::span<const double> omega_grid,
                                   double background, double omega_ref) {
    if (!(background > 0.0))
        throw std::invalid_argument("background must be > 0");
    for (const auto& m : modes) {
        if (!(m.kappa.rad_per_s() > 0.0))
            throw std::invalid_argument("mode kappa must be > 0");
        if (m.depth < 0.0 || m.depth > 1.0)
            throw std::invalid_argument("dip depth must be in [0,1]");
    }
    SpectrumTrace trace;
    trace.axis = TraceAxis::detuning_hz;
    trace.omega_ref = omega_ref;
    trace.abscissa.reserve(omega_grid.size());
    trace.intensity.reserve(omega_grid.size());
    for (double w : omega_grid) {
        double t = background;
        for (const auto& m : modes) {
            const double x =
                (w - m.omega_c.rad_per_s()) / m.kappa.rad_per_s();
            t *= 1.0 - m.depth / (1.0 + x * x);
        }
        trace.abscissa.push_back((w - omega_ref) / two_pi);
        trace.intensity.push_back(t);
    }
    trace.validate();
    return trace;
}

std::complex<double> phase_lag(AngularFrequency omega_s,
                               AngularFrequency omega_c, Rate kappa,
                               double s_s_mag, double s_c_mag,
                               double kappa_c_mag) {
    using namespace std::complex_literals;
    if (!(kappa.rad_per_s() > 0.0))
        throw std::invalid_argument("kappa must be > 0");
    if (!(s_s_mag > 0.0))
        throw std::invalid_argument("direct source amplitude must be > 0");
    const std::complex<double> indirect =
        (s_c_mag / 4.0) * 1.0i * omega_c.rad_per_s() * kappa_c_mag;
    const std::complex<double> direct =
        (s_s_mag / 2.0) *
        (1.0i * (omega_c.rad_per_s() - omega_s.rad_per_s()) +
         kappa.rad_per_s());
    return indirect / direct;
}

}  // namespace fanocqed
