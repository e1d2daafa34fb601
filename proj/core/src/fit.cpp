#include "fanocqed/fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fanocqed/constants.hpp"
#include "fanocqed/detail/linalg.hpp"

namespace fanocqed {

namespace {

constexpr double fwhm_to_sigma = 0.42466090014400953;  // 1/(2 sqrt(2 ln 2))

double mean_step(const SpectrumTrace& trace) {
    double sum = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        sum += trace.abscissa[i] - trace.abscissa[i - 1];
    return sum / static_cast<double>(trace.size() - 1);
}

void require_near_uniform(const SpectrumTrace& trace) {
    const double h = mean_step(trace);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double d = trace.abscissa[i] - trace.abscissa[i - 1];
        if (std::abs(d - h) > 0.01 * std::abs(h))
            throw std::invalid_argument(
                "convolution requires near-uniform abscissa sampling");
    }
}

// Kernel sigma expressed in the trace's own axis units.
double sigma_in_axis_units(const SpectrumTrace& trace,
                           const InstrumentResponse& response) {
    if (trace.axis == TraceAxis::wavelength_nm)
        return response.fwhm * 1e9 * fwhm_to_sigma;
    if (!(response.lambda_ref > 0.0))
        throw std::invalid_argument(
            "gaussian response on a detuning axis needs lambda_ref");
    const double fwhm_hz =
        response.fwhm * c_light / (response.lambda_ref * response.lambda_ref);
    return fwhm_hz * fwhm_to_sigma;
}

}  // namespace

void InstrumentResponse::validate() const {
    if (kind == Kind::gaussian && !(fwhm > 0.0))
        throw std::invalid_argument("gaussian response needs fwhm > 0");
}

SpectrumTrace convolve_response(const SpectrumTrace& trace,
                                const InstrumentResponse& response) {
    trace.validate();
    response.validate();
    if (response.kind == InstrumentResponse::Kind::none) return trace;

    require_near_uniform(trace);
    const double h = std::abs(mean_step(trace));
    const double sigma = sigma_in_axis_units(trace, response);
    const double span =
        std::abs(trace.abscissa.back() - trace.abscissa.front());
    if (8.0 * sigma > span)
        throw std::invalid_argument("response kernel wider than the window");

    const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma / h));
    std::vector<double> kernel(2 * half + 1);
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
        const double u = static_cast<double>(j) * h / sigma;
        kernel[j + half] = std::exp(-0.5 * u * u);
    }

    SpectrumTrace out = trace;
    const auto n = static_cast<std::ptrdiff_t>(trace.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0, norm = 0.0;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-half, -i);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(half, n - 1 - i);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            const double w = kernel[j + half];
            acc += w * trace.intensity[i + j];
            norm += w;
        }
        out.intensity[i] = acc / norm;
    }
    return out;
}

void FitProblem::validate() const {
    trace.validate();
    model.validate();
    response.validate();
    if (mode_toggles.size() != model.modes.size())
        throw std::invalid_argument("one ModeToggles entry per mode required");
    if (background.empty())
        throw std::invalid_argument(
            "background needs at least one coefficient");
    if (doublet_lock.enabled && model.modes.size() % 2 != 0)
        throw std::invalid_argument("doublet lock needs an even mode count");
}

namespace {

// Flat layout of every fittable scalar:
//   [scale, eps_d, phi_d, {omega_c, kappa, f_o, eps_c, phi_c} x modes, bg...]
enum class ParamKind { generic, omega_c };

struct ParamMeta {
    std::string name;
    ParamKind kind = ParamKind::generic;
    std::size_t mode_index = 0;
    bool free = false;
    bool log_scale = false;
    bool tied = false;  // derived by the doublet lock, never free
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

struct FlatProblem {
    const FitProblem* problem = nullptr;
    std::vector<double> values;
    std::vector<ParamMeta> meta;
    std::vector<std::size_t> free_idx;
    std::vector<double> weights;
    double omega_mid = 0.0;  // window center, offsets the omega_c parameters

    static constexpr std::size_t mode_stride = 5;
    std::size_t mode_base(std::size_t k) const { return 3 + mode_stride * k; }
    std::size_t bg_base() const {
        return 3 + mode_stride * problem->model.modes.size();
    }

    void apply_ties(std::vector<double>& v) const {
        if (!problem->doublet_lock.enabled) return;
        for (std::size_t k = 1; k < problem->model.modes.size(); k += 2) {
            v[mode_base(k) + 0] =
                v[mode_base(k - 1) + 0] + problem->doublet_lock.splitting;
            v[mode_base(k) + 1] = v[mode_base(k - 1) + 1];
        }
    }

    MultiModeModel to_model(const std::vector<double>& v) const {
        MultiModeModel m;
        m.scale = v[0];
        m.eps_d = v[1];
        m.phi_d = v[2];
        m.modes.resize(problem->model.modes.size());
        for (std::size_t k = 0; k < m.modes.size(); ++k) {
            const std::size_t b = mode_base(k);
            m.modes[k].omega_c = AngularFrequency::from_rad_per_s(v[b + 0]);
            m.modes[k].kappa = Rate::from_rad_per_s(v[b + 1]);
            m.modes[k].f_o = v[b + 2];
            m.modes[k].eps_c = v[b + 3];
            m.modes[k].phi_c = v[b + 4];
        }
        return m;
    }

    std::vector<double> to_background(const std::vector<double>& v) const {
        return {v.begin() + static_cast<std::ptrdiff_t>(bg_base()), v.end()};
    }

    // Transformed coordinates of the free subset: log for the positive
    // scale-family parameters, window-centered offsets for mode centers.
    std::vector<double> pack() const {
        std::vector<double> theta;
        theta.reserve(free_idx.size());
        for (std::size_t idx : free_idx) {
            double t = values[idx];
            if (meta[idx].log_scale)
                t = std::log(t);
            else if (meta[idx].kind == ParamKind::omega_c)
                t -= omega_mid;
            theta.push_back(t);
        }
        return theta;
    }

    std::vector<double> unpack(const std::vector<double>& theta) const {
        std::vector<double> v = values;
        for (std::size_t j = 0; j < free_idx.size(); ++j) {
            const std::size_t idx = free_idx[j];
            double val = theta[j];
            if (meta[idx].log_scale)
                val = std::exp(val);
            else if (meta[idx].kind == ParamKind::omega_c)
                val += omega_mid;
            val = std::clamp(val, meta[idx].lower, meta[idx].upper);
            v[idx] = val;
        }
        apply_ties(v);
        return v;
    }

    // Finite-difference step in transformed coordinates. Mode centers move
    // on the scale of their own linewidth, never their absolute frequency.
    double fd_step(std::size_t j, const std::vector<double>& theta,
                   const std::vector<double>& v) const {
        const std::size_t idx = free_idx[j];
        if (meta[idx].kind == ParamKind::omega_c)
            return 1e-6 * v[mode_base(meta[idx].mode_index) + 1];
        return 1e-6 * (1.0 + std::abs(theta[j]));
    }

    // Trust-region cap on one transformed step component: log parameters
    // move at most a factor e^0.7 per iteration, centers at most three
    // linewidths. Keeps early iterations from jumping out of the basin.
    double step_cap(std::size_t j, const std::vector<double>& theta,
                    const std::vector<double>& v) const {
        const std::size_t idx = free_idx[j];
        if (meta[idx].kind == ParamKind::omega_c)
            return 3.0 * v[mode_base(meta[idx].mode_index) + 1];
        if (meta[idx].log_scale) return 0.7;
        return 0.7 * (1.0 + std::abs(theta[j]));
    }
};

void push_param(FlatProblem& fp, const std::string& name, double value,
                const FitToggle& toggle, bool log_scale, bool tied,
                ParamKind kind = ParamKind::generic,
                std::size_t mode_index = 0) {
    ParamMeta m;
    m.name = name;
    m.kind = kind;
    m.mode_index = mode_index;
    m.free = toggle.free && !tied;
    m.log_scale = log_scale;
    m.tied = tied;
    m.lower = toggle.lower;
    m.upper = toggle.upper;
    if (m.free) {
        if (log_scale && !(value > 0.0))
            throw std::invalid_argument(
                "log-scale fit parameter must start positive: " + name);
        if (value < m.lower || value > m.upper)
            throw std::invalid_argument("initial value outside bounds: " +
                                        name);
    }
    fp.values.push_back(value);
    fp.meta.push_back(std::move(m));
}

FlatProblem flatten(const FitProblem& problem) {
    FlatProblem fp;
    fp.problem = &problem;
    fp.omega_mid = problem.trace.omega_at(problem.trace.size() / 2);

    push_param(fp, "scale", problem.model.scale, problem.scale, true, false);
    push_param(fp, "eps_d", problem.model.eps_d, problem.eps_d, false, false);
    push_param(fp, "phi_d", problem.model.phi_d, problem.phi_d, false, false);

    for (std::size_t k = 0; k < problem.model.modes.size(); ++k) {
        const auto& mode = problem.model.modes[k];
        const auto& t = problem.mode_toggles[k];
        const std::string base = "modes." + std::to_string(k) + ".";
        const bool tied = problem.doublet_lock.enabled && (k % 2 == 1);
        push_param(fp, base + "omega_c", mode.omega_c.rad_per_s(), t.omega_c,
                   false, tied, ParamKind::omega_c, k);
        push_param(fp, base + "kappa", mode.kappa.rad_per_s(), t.kappa, true,
                   tied);
        push_param(fp, base + "f_o", mode.f_o, t.f_o, true, false);
        push_param(fp, base + "eps_c", mode.eps_c, t.eps_c, false, false);
        push_param(fp, base + "phi_c", mode.phi_c, t.phi_c, false, false);
    }

    FitToggle bg_toggle;
    bg_toggle.free = problem.background_free;
    for (std::size_t j = 0; j < problem.background.size(); ++j)
        push_param(fp, "background.c" + std::to_string(j),
                   problem.background[j], bg_toggle, false, false);

    fp.apply_ties(fp.values);
    for (std::size_t i = 0; i < fp.meta.size(); ++i)
        if (fp.meta[i].free) fp.free_idx.push_back(i);
    if (fp.free_idx.empty() ) {
        // all-frozen problems are allowed; fit() degenerates to a residual
        // report
    }

    fp.weights.assign(problem.trace.size(), 1.0);
    if (!problem.trace.uncertainty.empty()) {
        for (std::size_t i = 0; i < problem.trace.size(); ++i) {
            const double u = problem.trace.uncertainty[i];
            if (!(u > 0.0))
                throw std::invalid_argument(
                    "trace uncertainties must be > 0");
            fp.weights[i] = 1.0 / u;
        }
    }
    return fp;
}

// Window-normalized background polynomial evaluated on the trace abscissa.
std::vector<double> background_profile(const SpectrumTrace& trace,
                                       const std::vector<double>& coeffs) {
    const double lo = trace.abscissa.front();
    const double hi = trace.abscissa.back();
    const double mid = 0.5 * (lo + hi);
    const double half = std::max(0.5 * std::abs(hi - lo), 1e-300);
    std::vector<double> out(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double u = (trace.abscissa[i] - mid) / half;
        double acc = 0.0;
        for (std::size_t j = coeffs.size(); j-- > 0;)
            acc = acc * u + coeffs[j];
        out[i] = acc;
    }
    return out;
}

std::vector<double> predict_impl(const FitProblem& problem,
                                 const MultiModeModel& model,
                                 const std::vector<double>& background) {
    const auto& trace = problem.trace;
    SpectrumTrace raw = trace;
    const auto bg = background_profile(trace, background);
    for (std::size_t i = 0; i < trace.size(); ++i)
        raw.intensity[i] = model.intensity(trace.omega_at(i)) * bg[i];
    if (problem.response.kind == InstrumentResponse::Kind::none)
        return raw.intensity;
    return convolve_response(raw, problem.response).intensity;
}

struct Residuals {
    std::vector<double> r;
    double cost = 0.0;   // sum of squares
    double norm = 0.0;   // sqrt(cost)
};

Residuals residuals_at(const FlatProblem& fp, const std::vector<double>& v) {
    const auto model = fp.to_model(v);
    model.validate();
    const auto pred = predict_impl(*fp.problem, model, fp.to_background(v));
    Residuals res;
    res.r.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        res.r[i] =
            (pred[i] - fp.problem->trace.intensity[i]) * fp.weights[i];
        res.cost += res.r[i] * res.r[i];
    }
    res.norm = std::sqrt(res.cost);
    return res;
}

// Forward-difference Jacobian in the transformed free coordinates.
std::vector<double> jacobian(const FlatProblem& fp,
                             const std::vector<double>& theta,
                             const std::vector<double>& r0) {
    const std::size_t n = r0.size();
    const std::size_t p = theta.size();
    const auto v0 = fp.unpack(theta);
    std::vector<double> jac(n * p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> th = theta;
        const double h = fp.fd_step(j, theta, v0);
        th[j] += h;
        const auto r1 = residuals_at(fp, fp.unpack(th));
        for (std::size_t i = 0; i < n; ++i)
            jac[i * p + j] = (r1.r[i] - r0[i]) / h;
    }
    return jac;
}

}  // namespace

std::vector<double> predict(const FitProblem& problem,
                            const MultiModeModel& model,
                            const std::vector<double>& background) {
    problem.validate();
    return predict_impl(problem, model, background);
}

FitResult fit(const FitProblem& problem, const FitOptions& options) {
    problem.validate();
    FlatProblem fp = flatten(problem);

    const std::size_t p = fp.free_idx.size();
    std::vector<double> theta = fp.pack();
    Residuals best = residuals_at(fp, fp.unpack(theta));

    FitResult result;
    result.initial_residual_norm = best.norm;
    result.status = "converged";
    result.converged = true;

    double lambda = options.damping;
    int iter = 0;
    bool stop = false;
    std::vector<double> jac;

    if (p > 0) {
        result.converged = false;
        result.status = "max_iterations";
        for (iter = 0; iter < options.max_iter && !stop; ++iter) {
            jac = jacobian(fp, theta, best.r);

            // Normal equations: A = J^T J, g = J^T r.
            std::vector<double> a(p * p, 0.0), grad(p, 0.0);
            for (std::size_t i = 0; i < best.r.size(); ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    const double jij = jac[i * p + j];
                    grad[j] += jij * best.r[i];
                    for (std::size_t k = j; k < p; ++k)
                        a[j * p + k] += jij * jac[i * p + k];
                }
            }
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t k = 0; k < j; ++k) a[j * p + k] = a[k * p + j];

            double gnorm = 0.0;
            for (double gj : grad) gnorm = std::max(gnorm, std::abs(gj));
            const double gscale = std::max(best.norm, 1e-300);
            if (gnorm / gscale < options.tolerance * (1.0 + best.norm) ||
                best.cost < 1e-280) {
                result.converged = true;
                result.status = "converged";
                break;
            }

            const std::vector<double> v_now = fp.unpack(theta);
            bool accepted = false;
            for (int inner = 0; inner < 30 && !accepted; ++inner) {
                std::vector<double> lhs = a;
                for (std::size_t j = 0; j < p; ++j)
                    lhs[j * p + j] +=
                        lambda * std::max(a[j * p + j], 1e-300);
                std::vector<double> step(p);
                try {
                    std::vector<double> rhs(p);
                    for (std::size_t j = 0; j < p; ++j) rhs[j] = -grad[j];
                    step = detail::solve_dense(lhs, rhs, p);
                } catch (const std::runtime_error&) {
                    lambda *= 10.0;
                    continue;
                }
                // A step breaching its trust bounds is rejected outright;
                // more damping shortens it along well-conditioned
                // directions instead of crushing the whole vector.
                bool capped = false;
                for (std::size_t j = 0; j < p && !capped; ++j)
                    capped = std::abs(step[j]) > fp.step_cap(j, theta, v_now);
                if (capped) {
                    lambda *= 4.0;
                    continue;
                }

                std::vector<double> trial = theta;
                for (std::size_t j = 0; j < p; ++j) trial[j] += step[j];
                Residuals cand;
                try {
                    cand = residuals_at(fp, fp.unpack(trial));
                } catch (const std::exception&) {
                    lambda *= 10.0;
                    continue;
                }
                // gain ratio against the local quadratic model
                double pred = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    double as = 0.0;
                    for (std::size_t k = 0; k < p; ++k)
                        as += a[j * p + k] * step[k];
                    pred -= step[j] * (2.0 * grad[j] + as);
                }
                const double actual = best.cost - cand.cost;
                if (pred > 0.0 && actual > 1e-4 * pred) {
                    const double rho = actual / pred;
                    double smax = 0.0;
                    for (std::size_t j = 0; j < p; ++j)
                        smax = std::max(smax, std::abs(step[j]) /
                                                  (1.0 + std::abs(theta[j])));
                    theta = trial;
                    best = cand;
                    if (rho > 0.75)
                        lambda = std::max(lambda / 3.0, 1e-14);
                    else if (rho < 0.25)
                        lambda *= 2.0;
                    accepted = true;
                    if (smax < 1e-13) {
                        result.converged = true;
                        result.status = "converged";
                        stop = true;
                    }
                } else {
                    lambda *= 4.0;
                }
            }
            if (!accepted) {
                // No useful descent direction left; treat as converged to a
                // numerical minimum.
                result.converged = true;
                result.status = "converged";
                stop = true;
            }
        }
    }
    result.iterations = iter;

    const std::vector<double> v = fp.unpack(theta);
    result.model = fp.to_model(v);
    result.background = fp.to_background(v);
    result.residual_norm = best.norm;

    // Linearized 1-sigma errors: cov = s^2 (J^T J)^-1 in transformed space,
    // mapped back through the log transform where applicable.
    std::vector<double> err_t(p, 0.0);
    if (p > 0 && best.r.size() > p) {
        jac = jacobian(fp, theta, best.r);
        std::vector<double> a(p * p, 0.0);
        for (std::size_t i = 0; i < best.r.size(); ++i)
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t k = 0; k < p; ++k)
                    a[j * p + k] += jac[i * p + j] * jac[i * p + k];
        const double s2 =
            best.cost / static_cast<double>(best.r.size() - p);
        try {
            for (std::size_t j = 0; j < p; ++j) {
                std::vector<double> e(p, 0.0);
                e[j] = 1.0;
                const auto col = detail::solve_dense(a, e, p);
                err_t[j] = std::sqrt(std::max(col[j] * s2, 0.0));
            }
        } catch (const std::runtime_error&) {
            result.status = "singular_jacobian";
        }
    }

    result.parameters.reserve(fp.meta.size());
    std::size_t jfree = 0;
    for (std::size_t i = 0; i < fp.meta.size(); ++i) {
        FitParameterValue pv;
        pv.name = fp.meta[i].name;
        pv.value = v[i];
        pv.free = fp.meta[i].free;
        if (fp.meta[i].free) {
            pv.error = fp.meta[i].log_scale ? std::abs(v[i]) * err_t[jfree]
                                            : err_t[jfree];
            ++jfree;
        }
        result.parameters.push_back(std::move(pv));
    }
    return result;
}

SpectrumTrace apply_noise(SpectrumTrace trace, const NoiseSpec& noise) {
    trace.validate();
    if (noise.kind == NoiseSpec::Kind::none || noise.level <= 0.0)
        return trace;
    std::mt19937_64 rng(noise.seed);
    double peak = 0.0;
    for (double y : trace.intensity) peak = std::max(peak, std::abs(y));
    // Box-Muller over the standardized mt19937_64 stream keeps traces
    // bit-reproducible across platforms.
    const auto normal = [&rng]() {
        const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    };
    for (double& y : trace.intensity) {
        if (noise.kind == NoiseSpec::Kind::multiplicative)
            y *= 1.0 + noise.level * normal();
        else
            y += noise.level * peak * normal();
    }
    return trace;
}

SpectrumTrace synthesize(const MultiModeModel& model,
                         const std::vector<double>& background,
                         const InstrumentResponse& response,
                         const NoiseSpec& noise, const TraceGrid& grid) {
    model.validate();
    response.validate();
    if (grid.abscissa.size() < 2)
        throw std::invalid_argument("grid needs at least two points");
    if (background.empty())
        throw std::invalid_argument("background needs a coefficient");

    SpectrumTrace trace;
    trace.axis = grid.axis;
    trace.omega_ref = grid.omega_ref;
    trace.abscissa = grid.abscissa;
    trace.intensity.resize(grid.abscissa.size());
    trace.validate();

    const auto bg = background_profile(trace, background);
    for (std::size_t i = 0; i < trace.size(); ++i)
        trace.intensity[i] = model.intensity(trace.omega_at(i)) * bg[i];

    if (response.kind != InstrumentResponse::Kind::none)
        trace = convolve_response(trace, response);

    return apply_noise(std::move(trace), noise);
}

ExtremumSeed seed_from_extremum(const SpectrumTrace& trace) {
    trace.validate();
    std::vector<double> sorted = trace.intensity;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double median = sorted[sorted.size() / 2];

    std::size_t best = 0;
    double best_dev = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double dev = std::abs(trace.intensity[i] - median);
        if (dev > best_dev) {
            best_dev = dev;
            best = i;
        }
    }
    ExtremumSeed seed;
    seed.center = trace.abscissa[best];
    seed.is_peak = trace.intensity[best] >= median;

    const double half_level = 0.5 * best_dev;
    std::size_t lo = best, hi = best;
    while (lo > 0 && std::abs(trace.intensity[lo] - median) > half_level) --lo;
    while (hi + 1 < trace.size() &&
           std::abs(trace.intensity[hi] - median) > half_level)
        ++hi;
    seed.width = std::abs(trace.abscissa[hi] - trace.abscissa[lo]);
    if (seed.width == 0.0)
        seed.width = std::abs(mean_step(trace));
    return seed;
}

double FitResult::parameter(const std::string& name) const {
    for (const auto& p : parameters)
        if (p.name == name) return p.value;
    throw std::invalid_argument("unknown fit parameter: " + name);
}

double FitResult::error_of(const std::string& name) const {
    for (const auto& p : parameters)
        if (p.name == name) return p.error;
    throw std::invalid_argument("unknown fit parameter: " + name);
}

}  // namespace fanocqed
