#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "fanocqed/backscatter.hpp"
#include "fanocqed/coupling.hpp"
#include "fanocqed/dynamics.hpp"
#include "fanocqed/fit.hpp"
#include "fanocqed/json_io.hpp"
#include "fanocqed/spectrum.hpp"
#include "fanocqed/trace_io.hpp"

namespace {

using namespace fanocqed;

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_schema = 2;
constexpr int exit_no_convergence = 3;

struct CommonOpts {
    std::string input;
    std::string output;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double tolerance = 1e-3;
    bool quiet = false;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open input: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("JSON parse error: ") + e.what());
    }
    require_schema(j);
    return j;
}

void info(const CommonOpts& opts, const std::string& msg) {
    if (!opts.quiet) std::cerr << msg << "\n";
}

// ---------------------------------------------------------------- simulate

TraceGrid grid_from_json(const json& j) {
    if (!j.contains("grid") || !j.at("grid").is_object())
        throw SchemaError("simulate input needs a \"grid\" object");
    const json& g = j.at("grid");
    TraceGrid grid;
    grid.axis = axis_from_string(g.value("axis", std::string("detuning_hz")));
    const double lo = get_num(g, "min");
    const double hi = get_num(g, "max");
    const auto points = static_cast<std::size_t>(get_num_or(g, "points", 801));
    if (!(hi > lo)) throw SchemaError("grid needs max > min");
    if (points < 2) throw SchemaError("grid needs at least 2 points");
    grid.abscissa = linspace(lo, hi, points);
    grid.omega_ref = two_pi * get_num_or(g, "omega_ref_hz_over_2pi", 0.0);
    return grid;
}

SpectrumTrace simulate_trace(const json& j, const TraceGrid& grid) {
    const std::string kind = j.value("kind", "");
    if (kind == "lens") {
        if (grid.axis != TraceAxis::detuning_hz)
            throw SchemaError("lens model runs on a detuning_hz grid");
        const double f_o = get_num(j, "f_o");
        const auto kappa =
            Rate::from_hz_over_2pi(get_num(j, "kappa_hz_over_2pi"));
        std::vector<double> dw(grid.abscissa.size());
        for (std::size_t i = 0; i < dw.size(); ++i)
            dw[i] = two_pi * grid.abscissa[i];
        return lens_spectrum(f_o, kappa, dw);
    }
    if (kind == "detected") {
        if (grid.axis != TraceAxis::detuning_hz)
            throw SchemaError("detected model runs on a detuning_hz grid");
        if (!j.contains("system") || !j.contains("channel"))
            throw SchemaError(
                "detected model needs \"system\" and \"channel\"");
        const auto params = system_params_from_json(j.at("system"));
        const auto channel = channel_from_json(j.at("channel"));
        std::vector<double> omega(grid.abscissa.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            omega[i] = params.omega_c.rad_per_s() + two_pi * grid.abscissa[i];
        return detected_spectrum(params, channel, omega);
    }
    if (kind == "multimode") {
        if (!j.contains("model"))
            throw SchemaError("multimode input needs a \"model\" object");
        const auto spec = multimode_from_json(j.at("model"));
        if (grid.axis == TraceAxis::wavelength_nm)
            return multimode_spectrum_wavelength(spec.model, grid.abscissa);
        std::vector<double> omega(grid.abscissa.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            omega[i] = grid.omega_ref + two_pi * grid.abscissa[i];
        return multimode_spectrum(spec.model, omega, grid.omega_ref);
    }
    if (kind == "dropfilter") {
        if (!j.contains("modes") || !j.at("modes").is_array())
            throw SchemaError("dropfilter input needs a \"modes\" array");
        std::vector<DropFilterMode> modes;
        for (const auto& mj : j.at("modes")) {
            DropFilterMode m;
            m.omega_c = AngularFrequency::from_hz_over_2pi(
                get_num(mj, "omega_c_hz_over_2pi"));
            m.kappa = Rate::from_hz_over_2pi(get_num(mj, "kappa_hz_over_2pi"));
            m.depth = get_num(mj, "depth");
            modes.push_back(m);
        }
        const double bg = get_num_or(j, "background", 1.0);
        if (grid.axis == TraceAxis::wavelength_nm) {
            std::vector<double> omega(grid.abscissa.size());
            for (std::size_t i = 0; i < omega.size(); ++i)
                omega[i] = two_pi * c_light / (grid.abscissa[i] * 1e-9);
            auto trace = drop_filter_spectrum(modes, omega, bg, 0.0);
            trace.axis = TraceAxis::wavelength_nm;
            trace.abscissa = grid.abscissa;
            trace.validate();
            return trace;
        }
        std::vector<double> omega(grid.abscissa.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            omega[i] = grid.omega_ref + two_pi * grid.abscissa[i];
        return drop_filter_spectrum(modes, omega, bg, grid.omega_ref);
    }
    throw SchemaError(
        "\"kind\" must be lens, detected, multimode or dropfilter");
}

int cmd_simulate(const CommonOpts& opts) {
    const json j = load_json(opts.input);
    const TraceGrid grid = grid_from_json(j);
    SpectrumTrace trace = simulate_trace(j, grid);

    if (j.contains("response")) {
        const auto response = response_from_json(j.at("response"));
        trace = convolve_response(trace, response);
    }
    if (j.contains("noise")) {
        const auto noise = noise_from_json(j.at("noise"), opts.seed);
        trace = apply_noise(std::move(trace), noise);
    }
    write_trace_csv_file(trace, opts.output);
    info(opts, "wrote " + opts.output);
    return exit_ok;
}

// -------------------------------------------------------------------- fit

FitProblem problem_from_json(const json& j, const std::string& trace_path) {
    FitProblem prob;
    prob.trace = read_trace_csv_file(trace_path);

    if (!j.contains("model"))
        throw SchemaError("fit input needs a \"model\" object");
    const auto spec = multimode_from_json(j.at("model"));
    prob.model = spec.model;
    prob.scale = spec.scale;
    prob.eps_d = spec.eps_d;
    prob.phi_d = spec.phi_d;
    prob.mode_toggles = spec.mode_toggles;

    if (j.contains("background")) {
        const json& bj = j.at("background");
        if (bj.contains("coeffs")) {
            prob.background = bj.at("coeffs").get<std::vector<double>>();
        } else if (bj.contains("degree")) {
            prob.background.assign(
                static_cast<std::size_t>(bj.at("degree").get<int>()) + 1, 0.0);
            prob.background[0] = 1.0;
        }
        prob.background_free = bj.value("free", false);
    }
    if (j.contains("response"))
        prob.response = response_from_json(j.at("response"));
    if (j.contains("doublet_lock")) {
        const json& dj = j.at("doublet_lock");
        prob.doublet_lock.enabled = dj.value("enabled", false);
        prob.doublet_lock.splitting =
            two_pi * get_num_or(dj, "splitting_hz", 0.0);
    }
    prob.validate();
    return prob;
}

int cmd_fit(const CommonOpts& opts) {
    const json j = load_json(opts.input);
    const std::string trace_path = j.value("trace_csv", "");
    if (trace_path.empty()) throw SchemaError("fit input needs \"trace_csv\"");

    FitProblem prob;
    try {
        prob = problem_from_json(j, trace_path);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    } catch (const std::runtime_error& e) {
        throw SchemaError(e.what());
    }

    FitOptions fit_opts;
    if (j.contains("options")) {
        const json& oj = j.at("options");
        fit_opts.max_iter =
            static_cast<int>(get_num_or(oj, "max_iter", fit_opts.max_iter));
        fit_opts.tolerance = get_num_or(oj, "tolerance", fit_opts.tolerance);
        fit_opts.damping = get_num_or(oj, "damping", fit_opts.damping);
    }

    const FitResult result = fit(prob, fit_opts);

    std::ofstream out(opts.output);
    if (!out) throw std::runtime_error("cannot open output: " + opts.output);
    out << to_json(result).dump(2) << "\n";

    const std::string overlay = j.value("overlay_csv", "");
    if (!overlay.empty()) {
        const auto model_curve =
            predict(prob, result.model, result.background);
        std::ofstream oc(overlay);
        if (!oc) throw std::runtime_error("cannot open output: " + overlay);
        oc << "# " << schema_version << " fit-overlay\n";
        oc << "# columns: " << to_string(prob.trace.axis)
           << ",intensity,model,residual\n";
        oc << std::setprecision(17);
        for (std::size_t i = 0; i < prob.trace.size(); ++i)
            oc << prob.trace.abscissa[i] << ',' << prob.trace.intensity[i]
               << ',' << model_curve[i] << ','
               << prob.trace.intensity[i] - model_curve[i] << '\n';
    }

    info(opts, "status: " + result.status +
                   ", residual_norm: " + std::to_string(result.residual_norm));
    return result.converged ? exit_ok : exit_no_convergence;
}

// ------------------------------------------------------------------ modes

int cmd_modes(const CommonOpts& opts) {
    const json j = load_json(opts.input);
    if (!j.contains("rows") || !j.at("rows").is_array())
        throw SchemaError("modes input needs a \"rows\" array");

    DipoleEmitter emitter;
    const bool have_emitter = j.contains("emitter");
    if (have_emitter) emitter = emitter_from_json(j.at("emitter"));

    std::ofstream out(opts.output);
    if (!out) throw std::runtime_error("cannot open output: " + opts.output);
    out << "# " << schema_version << " mode-table\n";
    out << "# columns: label,q_s,inv_q_beta,split_ghz,g_max_ghz,q_low,q_high\n";
    out << std::setprecision(10);

    bool any_failed = false;
    std::size_t row_index = 0;
    for (const auto& row : j.at("rows")) {
        const std::string label =
            row.value("label", "row" + std::to_string(row_index));
        ++row_index;
        try {
            if (!row.contains("mode") || !row.contains("scatterer"))
                throw SchemaError("row needs \"mode\" and \"scatterer\"");
            const auto mode = mode_geometry_from_json(row.at("mode"));
            const auto sc = scatterer_from_json(row.at("scatterer"));

            const double q_s = scattering_q(mode, sc);
            const auto bs = backscatter(mode, sc);
            if (!bs.sub_wavelength)
                info(opts,
                     "warning: " + label + ": scatterer is not sub-wavelength");
            const double split_ghz = 2.0 * bs.beta_mag.hz_over_2pi() / 1e9;

            DipoleEmitter em = emitter;
            if (!have_emitter) {
                em.gamma_parallel = Rate::from_hz_over_2pi(12e6);
                em.zpl_fraction = 1.0;
                em.lambda_emit = mode.lambda0;
                em.n_host = 2.4;
            }
            const double g_max_ghz =
                coupling_rate(em, mode, mode.eta_s, em.n_host).hz_over_2pi() /
                1e9;

            double q_low = std::numeric_limits<double>::quiet_NaN();
            double q_high = q_low;
            if (row.contains("q_intrinsic")) {
                const auto dl =
                    doublet_loss(get_num(row, "q_intrinsic"), mode, sc);
                q_low = dl.q_low;
                q_high = dl.q_high;
            }
            out << label << ',' << q_s << ',' << bs.normalized_splitting()
                << ',' << split_ghz << ',' << g_max_ghz << ',' << q_low << ','
                << q_high << '\n';
        } catch (const std::exception& e) {
            any_failed = true;
            std::cerr << "row " << label << ": " << e.what() << "\n";
        }
    }
    return any_failed ? exit_numerical : exit_ok;
}

// ----------------------------------------------------------------- regress

int cmd_regress(const CommonOpts& opts) {
    const json j = load_json(opts.input);
    if (!j.contains("system"))
        throw SchemaError("regress input needs a \"system\" object");
    const json& sj = j.at("system");

    SystemParams params;
    params.g = rate_from(sj, "g_hz_over_2pi");
    params.kappa = rate_from(sj, "kappa_hz_over_2pi");
    params.gamma_s = rate_from(sj, "gamma_s_hz_over_2pi");
    params.omega_c =
        AngularFrequency::from_hz_over_2pi(get_num(sj, "omega_c_hz_over_2pi"));
    params.omega_d = params.omega_c;

    if (sj.contains("gamma_p_hz_over_2pi")) {
        params.gamma_p = rate_from(sj, "gamma_p_hz_over_2pi");
    } else {
        const double mult = get_num_or(j, "gamma_p_multiplier", 1e3);
        params.gamma_p = Rate::from_rad_per_s(
            mult * std::max({params.kappa.rad_per_s(), params.g.rad_per_s(),
                             params.gamma_s.rad_per_s()}));
    }
    params.validate();

    CollectionChannel channel{1.0, 1.0, pi / 2.0, 0.0};
    if (j.contains("channel")) channel = channel_from_json(j.at("channel"));

    const double span = get_num_or(j, "span_kappas", 15.0);
    const auto points = static_cast<std::size_t>(get_num_or(j, "points", 801));
    const double wc = params.omega_c.rad_per_s();
    const double k = params.kappa.rad_per_s();
    if (!(k > 0.0)) throw SchemaError("regress needs kappa > 0");
    const auto grid = linspace(wc - span * k, wc + span * k, points);

    NumericSpectrumOptions nopts;
    nopts.threads = opts.threads;
    const auto numeric = numeric_spectrum(params, channel, grid, nopts);
    const auto closed = detected_spectrum(params, channel, grid);

    double closed_peak = 0.0;
    for (double v : closed.intensity)
        closed_peak = std::max(closed_peak, std::abs(v));

    double max_rel = 0.0;
    std::ofstream out(opts.output);
    if (!out) throw std::runtime_error("cannot open output: " + opts.output);
    out << "# " << schema_version << " regression-report\n";
    out << "# columns: omega_rad_per_s,s_numeric,s_closed,rel_error\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double denom =
            std::max(std::abs(closed.intensity[i]), 1e-12 * closed_peak);
        const double rel =
            std::abs(numeric.trace.intensity[i] - closed.intensity[i]) / denom;
        max_rel = std::max(max_rel, rel);
        out << grid[i] << ',' << numeric.trace.intensity[i] << ','
            << closed.intensity[i] << ',' << rel << '\n';
    }
    out << "# max_rel_error = " << max_rel << "\n";

    info(opts, "max_rel_error = " + std::to_string(max_rel));
    return max_rel <= opts.tolerance ? exit_ok : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fanocqed: dipole-microdisk Fano interference spectra, scatterer "
        "perturbation estimates and spectral fits"};
    app.require_subcommand(1);

    CommonOpts opts;
    int (*handler)(const CommonOpts&) = nullptr;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", opts.input, "input file")->required();
        cmd->add_option("--output", opts.output, "output file")->required();
        cmd->add_option("--seed", opts.seed, "noise seed");
        cmd->add_option("--threads", opts.threads, "worker threads");
        cmd->add_option("--tolerance", opts.tolerance,
                        "pass/fail threshold where applicable");
        cmd->add_flag("--quiet", opts.quiet, "suppress progress messages");
    };

    auto* sim =
        app.add_subcommand("simulate", "JSON model in, CSV spectrum trace out");
    add_common(sim);
    sim->callback([&] { handler = cmd_simulate; });

    auto* fitc = app.add_subcommand(
        "fit", "JSON problem (referencing a CSV trace) in, JSON report out");
    add_common(fitc);
    fitc->callback([&] { handler = cmd_fit; });

    auto* modes = app.add_subcommand(
        "modes", "tabulate Q_s, splitting and max coupling per mode row");
    add_common(modes);
    modes->callback([&] { handler = cmd_modes; });

    auto* regress = app.add_subcommand(
        "regress", "numeric vs closed-form spectrum comparison report");
    add_common(regress);
    regress->callback([&] { handler = cmd_regress; });

    CLI11_PARSE(app, argc, argv);

    try {
        return handler(opts);
    } catch (const fanocqed::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return exit_schema;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_schema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
