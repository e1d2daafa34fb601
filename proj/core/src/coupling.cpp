#include "fanocqed/coupling.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fanocqed/constants.hpp"

namespace fanocqed {

double FieldSample::energy_density() const {
    const double e2 =
        std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]);
    return n * n * e2;
}

void SampledField::validate() const {
    if (samples.empty())
        throw std::invalid_argument("SampledField needs at least one sample");
    for (const auto& s : samples) {
        if (!(s.cell_volume > 0.0))
            throw std::invalid_argument("cell volumes must be > 0");
        if (!(s.n > 0.0))
            throw std::invalid_argument("refractive index must be > 0");
    }
}

SampledField SampledField::from_csv(std::istream& in) {
    SampledField field;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::array<double, 11> v{};
        char comma = ',';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(ss >> v[i]))
                throw std::runtime_error("field CSV parse error at line " +
                                         std::to_string(lineno));
            if (i + 1 < v.size()) ss >> comma;
        }
        FieldSample s;
        s.position = {v[0], v[1], v[2]};
        s.n = v[3];
        s.e = {std::complex<double>(v[4], v[5]),
               std::complex<double>(v[6], v[7]),
               std::complex<double>(v[8], v[9])};
        s.cell_volume = v[10];
        field.samples.push_back(s);
    }
    field.validate();
    return field;
}

SampledField SampledField::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field CSV: " + path);
    return from_csv(in);
}

namespace {

double peak_energy_density(const SampledField& field) {
    double peak = 0.0;
    for (const auto& s : field.samples)
        peak = std::max(peak, s.energy_density());
    return peak;
}

}  // namespace

double effective_mode_volume(const SampledField& field) {
    field.validate();
    const double peak = peak_energy_density(field);
    if (!(peak > 0.0))
        throw std::invalid_argument("field is identically zero");
    double integral = 0.0;
    for (const auto& s : field.samples)
        integral += s.energy_density() * s.cell_volume;
    return integral / peak;
}

double eta_ratio(const SampledField& field, std::size_t sample_index) {
    field.validate();
    if (sample_index >= field.samples.size())
        throw std::invalid_argument("sample index out of range");
    const double peak = peak_energy_density(field);
    if (!(peak > 0.0))
        throw std::invalid_argument("field is identically zero");
    const double local = field.samples[sample_index].energy_density();
    if (!(local > 0.0))
        throw std::invalid_argument(
            "site has zero field; eta ratio undefined there");
    return local / peak;
}

double eta_ratio_at(const SampledField& field,
                    const std::array<double, 3>& site, double rel_tol) {
    field.validate();
    double scale = 0.0;
    for (const auto& s : field.samples)
        scale = std::max(scale, std::cbrt(s.cell_volume));
    const double tol = rel_tol * std::max(scale, 1.0);
    for (std::size_t i = 0; i < field.samples.size(); ++i) {
        const auto& p = field.samples[i].position;
        const double d = std::hypot(p[0] - site[0], p[1] - site[1],
                                    p[2] - site[2]);
        if (d <= tol) return eta_ratio(field, i);
    }
    throw std::invalid_argument("site does not lie on the sampled grid");
}

double photon_field(AngularFrequency omega, double v_eff_m3, double eta_site,
                    double n_site) {
    if (!(eta_site > 0.0) || eta_site > 1.0)
        throw std::invalid_argument("eta_site must be in (0,1]");
    if (!(v_eff_m3 > 0.0))
        throw std::invalid_argument("mode volume must be > 0");
    if (!(n_site > 0.0))
        throw std::invalid_argument("n_site must be > 0");
    return std::sqrt(hbar * omega.rad_per_s() * eta_site /
                     (2.0 * eps0 * n_site * n_site * v_eff_m3));
}

double photon_field(const ModeGeometry& mode, double eta_site, double n_site) {
    mode.validate();
    return photon_field(mode.omega0(), mode.v_eff_sw_m3(), eta_site, n_site);
}

double dipole_moment(const DipoleEmitter& emitter) {
    emitter.validate();
    const double w = wavelength_to_angular(emitter.lambda_emit).rad_per_s();
    const double mu2 = 3.0 * pi * pi * hbar * eps0 * c_light * c_light *
                       c_light * emitter.gamma_parallel.rad_per_s() /
                       (emitter.n_host * w * w * w);
    return std::sqrt(mu2);
}

Rate coupling_rate(const DipoleEmitter& emitter, const ModeGeometry& mode,
                   double eta_site, double n_site, double alignment) {
    const double mu = dipole_moment(emitter);
    const double e_ph = photon_field(mode, eta_site, n_site);
    return Rate::from_rad_per_s(std::abs(alignment) * mu * e_ph / hbar);
}

Rate zpl_coupling_rate(const DipoleEmitter& emitter, const ModeGeometry& mode,
                       double eta_site, double n_site, double alignment) {
    const Rate g = coupling_rate(emitter, mode, eta_site, n_site, alignment);
    return Rate::from_rad_per_s(g.rad_per_s() *
                                std::sqrt(emitter.zpl_fraction));
}

double purcell_factor(Rate g, Rate kappa, Rate gamma_s) {
    if (!(kappa.rad_per_s() > 0.0) || !(gamma_s.rad_per_s() > 0.0))
        throw std::invalid_argument("kappa and gamma_s must be > 0");
    const double gv = g.rad_per_s();
    return 2.0 * gv * gv / (kappa.rad_per_s() * gamma_s.rad_per_s());
}

Rate g_from_purcell(double f_o, Rate kappa, Rate gamma_s) {
    if (f_o < 0.0) throw std::invalid_argument("F_o must be >= 0");
    if (!(kappa.rad_per_s() > 0.0) || !(gamma_s.rad_per_s() > 0.0))
        throw std::invalid_argument("kappa and gamma_s must be > 0");
    return Rate::from_rad_per_s(
        std::sqrt(f_o * kappa.rad_per_s() * gamma_s.rad_per_s() / 2.0));
}

}  // namespace fanocqed
