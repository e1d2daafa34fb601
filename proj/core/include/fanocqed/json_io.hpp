#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fanocqed/coupling.hpp"
#include "fanocqed/fit.hpp"
#include "fanocqed/spectrum.hpp"
#include "fanocqed/system.hpp"
#include "fanocqed/trace_io.hpp"

// JSON bindings for the domain records. Field names follow the documented
// schema ("fano-cqed/1"): every rate or frequency crosses the boundary as a
// *_hz_over_2pi value; storage stays angular.

namespace fanocqed {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

inline void require_schema(const json& j) {
    if (!j.is_object() || !j.contains("schema") ||
        j.at("schema") != schema_version)
        throw SchemaError(std::string("document must declare \"schema\": \"") +
                          schema_version + "\"");
}

inline double get_num(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw SchemaError("missing or non-numeric field: " + key);
    return j.at(key).get<double>();
}

inline double get_num_or(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw SchemaError("non-numeric field: " + key);
    return j.at(key).get<double>();
}

inline Rate rate_from(const json& j, const std::string& key) {
    return Rate::from_hz_over_2pi(get_num(j, key));
}

inline SystemParams system_params_from_json(const json& j) {
    SystemParams p;
    p.g = rate_from(j, "g_hz_over_2pi");
    p.kappa = rate_from(j, "kappa_hz_over_2pi");
    p.gamma_s = rate_from(j, "gamma_s_hz_over_2pi");
    p.gamma_p = Rate::from_hz_over_2pi(get_num_or(j, "gamma_p_hz_over_2pi", 0.0));
    p.omega_c =
        AngularFrequency::from_hz_over_2pi(get_num(j, "omega_c_hz_over_2pi"));
    p.omega_d = AngularFrequency::from_hz_over_2pi(
        get_num_or(j, "omega_d_hz_over_2pi", get_num(j, "omega_c_hz_over_2pi")));
    p.validate();
    return p;
}

inline json to_json(const SystemParams& p) {
    return json{{"g_hz_over_2pi", p.g.hz_over_2pi()},
                {"kappa_hz_over_2pi", p.kappa.hz_over_2pi()},
                {"gamma_s_hz_over_2pi", p.gamma_s.hz_over_2pi()},
                {"gamma_p_hz_over_2pi", p.gamma_p.hz_over_2pi()},
                {"omega_c_hz_over_2pi", p.omega_c.hz_over_2pi()},
                {"omega_d_hz_over_2pi", p.omega_d.hz_over_2pi()}};
}

inline ModeGeometry mode_geometry_from_json(const json& j) {
    ModeGeometry m;
    if (!j.contains("polarization") || !j.at("polarization").is_string())
        throw SchemaError("mode needs a \"polarization\" string");
    m.polarization =
        polarization_from_string(j.at("polarization").get<std::string>());
    m.p = static_cast<int>(get_num(j, "p"));
    m.m = static_cast<int>(get_num_or(j, "m", 0));
    m.lambda0 = get_num(j, "lambda0");
    m.n_disk = get_num(j, "n_disk");
    m.v_eff_sw = get_num(j, "v_eff_sw");
    m.eta_s = get_num(j, "eta_s");
    m.eta_nc = get_num(j, "eta_nc");
    m.q_rad = get_num_or(j, "q_rad", 0.0);
    m.n_eff = get_num_or(j, "n_eff", 0.0);
    m.validate();
    return m;
}

inline json to_json(const ModeGeometry& m) {
    return json{{"polarization", to_string(m.polarization)},
                {"p", m.p},
                {"m", m.m},
                {"lambda0", m.lambda0},
                {"n_disk", m.n_disk},
                {"v_eff_sw", m.v_eff_sw},
                {"eta_s", m.eta_s},
                {"eta_nc", m.eta_nc},
                {"q_rad", m.q_rad},
                {"n_eff", m.n_eff}};
}

inline Scatterer scatterer_from_json(const json& j) {
    Scatterer s;
    s.n_nc = get_num(j, "n_nc");
    if (j.contains("diameter_m"))
        s.v_nc = sphere_volume(get_num(j, "diameter_m"));
    else
        s.v_nc = get_num(j, "v_nc");
    s.eta_at_site = get_num(j, "eta_at_site");
    s.validate();
    return s;
}

inline json to_json(const Scatterer& s) {
    return json{{"n_nc", s.n_nc},
                {"v_nc", s.v_nc},
                {"eta_at_site", s.eta_at_site}};
}

inline DipoleEmitter emitter_from_json(const json& j) {
    DipoleEmitter e;
    e.gamma_parallel = rate_from(j, "gamma_parallel_hz_over_2pi");
    e.zpl_fraction = get_num_or(j, "zpl_fraction", 1.0);
    e.lambda_emit = get_num(j, "lambda_emit");
    e.n_host = get_num(j, "n_host");
    e.validate();
    return e;
}

inline CollectionChannel channel_from_json(const json& j) {
    CollectionChannel c;
    c.eps_d = get_num_or(j, "eps_d", 0.0);
    c.eps_c = get_num_or(j, "eps_c", 0.0);
    c.phi_d = get_num_or(j, "phi_d", 0.0);
    c.phi_c = get_num_or(j, "phi_c", 0.0);
    c.validate();
    return c;
}

// A fittable scalar is either a bare (frozen) number or an object
// {"value": v, "free": bool, "min": lo, "max": hi}.
struct ParamSpec {
    double value = 0.0;
    FitToggle toggle;
};

inline ParamSpec param_spec(const json& j, const std::string& key,
                            double dflt, bool required = false) {
    ParamSpec ps;
    ps.value = dflt;
    if (!j.contains(key)) {
        if (required) throw SchemaError("missing field: " + key);
        return ps;
    }
    const json& v = j.at(key);
    if (v.is_number()) {
        ps.value = v.get<double>();
        return ps;
    }
    if (!v.is_object())
        throw SchemaError("field must be a number or object: " + key);
    ps.value = get_num(v, "value");
    ps.toggle.free = v.value("free", false);
    ps.toggle.lower = get_num_or(v, "min", ps.toggle.lower);
    ps.toggle.upper = get_num_or(v, "max", ps.toggle.upper);
    return ps;
}

struct MultiModeSpec {
    MultiModeModel model;
    FitToggle scale, eps_d, phi_d;
    std::vector<ModeToggles> mode_toggles;
};

inline MultiModeSpec multimode_from_json(const json& j) {
    MultiModeSpec spec;
    const auto scale = param_spec(j, "scale", 1.0);
    const auto eps_d = param_spec(j, "eps_d", 1.0);
    const auto phi_d = param_spec(j, "phi_d", 0.0);
    spec.model.scale = scale.value;
    spec.model.eps_d = eps_d.value;
    spec.model.phi_d = phi_d.value;
    spec.scale = scale.toggle;
    spec.eps_d = eps_d.toggle;
    spec.phi_d = phi_d.toggle;

    if (!j.contains("modes") || !j.at("modes").is_array())
        throw SchemaError("model needs a \"modes\" array");
    for (const auto& mj : j.at("modes")) {
        const auto omega = param_spec(mj, "omega_c_hz_over_2pi", 0.0, true);
        const auto kappa = param_spec(mj, "kappa_hz_over_2pi", 0.0, true);
        const auto f_o = param_spec(mj, "f_o", 0.0, true);
        const auto eps_c = param_spec(mj, "eps_c", 1.0);
        const auto phi_c = param_spec(mj, "phi_c", 0.0);

        CavityModeTerm term;
        term.omega_c = AngularFrequency::from_hz_over_2pi(omega.value);
        term.kappa = Rate::from_hz_over_2pi(kappa.value);
        term.f_o = f_o.value;
        term.eps_c = eps_c.value;
        term.phi_c = phi_c.value;
        spec.model.modes.push_back(term);

        ModeToggles t;
        const auto angular = [](FitToggle ft) {
            if (std::isfinite(ft.lower)) ft.lower *= two_pi;
            if (std::isfinite(ft.upper)) ft.upper *= two_pi;
            return ft;
        };
        t.omega_c = angular(omega.toggle);
        t.kappa = angular(kappa.toggle);
        t.f_o = f_o.toggle;
        t.eps_c = eps_c.toggle;
        t.phi_c = phi_c.toggle;
        spec.mode_toggles.push_back(t);
    }
    spec.model.validate();
    return spec;
}

inline json to_json(const MultiModeModel& m) {
    json modes = json::array();
    for (const auto& mode : m.modes)
        modes.push_back(json{{"omega_c_hz_over_2pi", mode.omega_c.hz_over_2pi()},
                             {"kappa_hz_over_2pi", mode.kappa.hz_over_2pi()},
                             {"f_o", mode.f_o},
                             {"eps_c", mode.eps_c},
                             {"phi_c", mode.phi_c}});
    return json{{"eps_d", m.eps_d},
                {"phi_d", m.phi_d},
                {"scale", m.scale},
                {"modes", std::move(modes)}};
}

inline InstrumentResponse response_from_json(const json& j) {
    InstrumentResponse r;
    if (j.is_null()) return r;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") {
        r.kind = InstrumentResponse::Kind::none;
    } else if (kind == "gaussian") {
        r.kind = InstrumentResponse::Kind::gaussian;
        r.fwhm = get_num(j, "fwhm_m");
        r.lambda_ref = get_num_or(j, "lambda_ref_m", 0.0);
    } else {
        throw SchemaError("response kind must be \"none\" or \"gaussian\"");
    }
    r.validate();
    return r;
}

inline NoiseSpec noise_from_json(const json& j, std::uint64_t default_seed) {
    NoiseSpec n;
    n.seed = default_seed;
    if (j.is_null()) return n;
    const std::string kind = j.value("kind", "none");
    if (kind == "none")
        n.kind = NoiseSpec::Kind::none;
    else if (kind == "multiplicative")
        n.kind = NoiseSpec::Kind::multiplicative;
    else if (kind == "additive")
        n.kind = NoiseSpec::Kind::additive;
    else
        throw SchemaError("noise kind must be none|multiplicative|additive");
    n.level = get_num_or(j, "level", 0.0);
    if (j.contains("seed")) n.seed = j.at("seed").get<std::uint64_t>();
    return n;
}

// FitResult report with the documented field names. Frequencies and rates
// are reported as *_hz_over_2pi next to their internal names.
inline json to_json(const FitResult& r) {
    json params = json::object();
    json errors = json::object();
    for (const auto& p : r.parameters) {
        const bool is_rate = p.name.ends_with(".omega_c") ||
                             p.name.ends_with(".kappa");
        const std::string name =
            is_rate ? p.name + "_hz_over_2pi" : p.name;
        const double scale = is_rate ? 1.0 / two_pi : 1.0;
        params[name] = p.value * scale;
        if (p.free) errors[name] = p.error * scale;
    }
    return json{{"schema", schema_version},
                {"parameters", std::move(params)},
                {"errors", std::move(errors)},
                {"residual_norm", r.residual_norm},
                {"initial_residual_norm", r.initial_residual_norm},
                {"iterations", r.iterations},
                {"status", r.status}};
}

}  // namespace fanocqed
