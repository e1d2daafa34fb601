#include "fanocqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fanocqed/constants.hpp"
#include "fanocqed/detail/linalg.hpp"
#include "fanocqed/detail/parallel.hpp"
#include "fanocqed/detail/rk45.hpp"

namespace fanocqed {

namespace {

// Equal-time moment system in the frame rotating at omega_c, packed as
// y = [p_c, p_d, Re x, Im x] plus quadrature accumulators [4..7]:
//   p_c' = -2 kappa p_c + 2 g Re x
//   p_d' = -gamma_s p_d - 2 g Re x
//   x'   = (i (omega_c - omega_d) - theta) x + g (p_d - p_c),
// theta = kappa + gamma_s/2 + gamma_p.
struct MomentOde {
    double kappa, gamma_s, g, theta, delta_cd;

    explicit MomentOde(const SystemParams& p)
        : kappa(p.kappa.rad_per_s()),
          gamma_s(p.gamma_s.rad_per_s()),
          g(p.g.rad_per_s()),
          theta(p.kappa.rad_per_s() + 0.5 * p.gamma_s.rad_per_s() +
                p.gamma_p.rad_per_s()),
          delta_cd(p.omega_c.rad_per_s() - p.omega_d.rad_per_s()) {}

    void operator()(double, const std::array<double, 8>& y,
                    std::array<double, 8>& dy) const {
        dy[0] = -2.0 * kappa * y[0] + 2.0 * g * y[2];
        dy[1] = -gamma_s * y[1] - 2.0 * g * y[2];
        dy[2] = -theta * y[2] - delta_cd * y[3] + g * (y[1] - y[0]);
        dy[3] = delta_cd * y[2] - theta * y[3];
        dy[4] = y[0];
        dy[5] = y[1];
        dy[6] = y[2];
        dy[7] = y[3];
    }

    // Drift matrix of the 4-dim moment block, row-major.
    std::vector<double> drift() const {
        return {-2.0 * kappa, 0.0, 2.0 * g,  0.0,       //
                0.0,  -gamma_s,  -2.0 * g,  0.0,        //
                -g,   g,         -theta,    -delta_cd,  //
                0.0,  0.0,       delta_cd,  -theta};
    }
};

MomentState unpack(const std::array<double, 8>& y) {
    MomentState s;
    s.p_c = y[0];
    s.p_d = y[1];
    s.x_cross = complexd(y[2], y[3]);
    return s;
}

// Integral of the moment block from state y at time T to infinity:
// solves A m_tail = -m(T). Throws if A is singular (no decay path).
std::array<double, 4> linear_tail(const MomentOde& ode,
                                  const std::array<double, 8>& y) {
    std::vector<double> a = ode.drift();
    std::vector<double> b = {-y[0], -y[1], -y[2], -y[3]};
    detail::solve_dense_inplace(a, b, 4);
    return {b[0], b[1], b[2], b[3]};
}

double min_nonzero_decay(const SystemParams& p) {
    const double rates[] = {2.0 * p.kappa.rad_per_s(), p.gamma_s.rad_per_s(),
                            p.kappa.rad_per_s() + 0.5 * p.gamma_s.rad_per_s() +
                                p.gamma_p.rad_per_s()};
    double m = std::numeric_limits<double>::infinity();
    for (double r : rates)
        if (r > 0.0) m = std::min(m, r);
    return m;
}

}  // namespace

MomentTrajectory moment_evolution(const SystemParams& params,
                                  std::span<const double> t_grid, double rtol,
                                  double atol) {
    params.validate();
    if (t_grid.empty()) throw std::invalid_argument("empty time grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0)
            throw std::invalid_argument("time grid must be non-negative");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("time grid must be increasing");
    }

    const MomentOde ode(params);
    detail::Rk45<8, MomentOde> solver(ode, rtol, atol);

    std::array<double, 8> y{};
    y[1] = 1.0;  // dipole excited, cavity empty

    MomentTrajectory traj;
    traj.t.assign(t_grid.begin(), t_grid.end());
    traj.states.reserve(t_grid.size());

    double t = 0.0;
    for (double tk : t_grid) {
        solver.integrate(y, t, tk);
        t = tk;
        traj.states.push_back(unpack(y));
    }
    traj.solver_steps = solver.steps();

    traj.integrals.p_c = y[4];
    traj.integrals.p_d = y[5];
    traj.integrals.x_cross = complexd(y[6], y[7]);
    traj.tail_fraction = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto tail = linear_tail(ode, y);
        traj.integrals.p_c += tail[0];
        traj.integrals.p_d += tail[1];
        traj.integrals.x_cross += complexd(tail[2], tail[3]);
        const double ref = std::max(std::abs(traj.integrals.p_d),
                                    std::abs(traj.integrals.p_c));
        if (ref > 0.0)
            traj.tail_fraction =
                std::max(std::abs(tail[1]), std::abs(tail[0])) / ref;
    } catch (const std::runtime_error&) {
        // Undamped system: integrals to infinity do not exist; the sampled
        // trajectory is still valid.
    }
    return traj;
}

Mat2c expm_2x2(const Mat2c& m, double tau) {
    const complexd mu = 0.5 * (m.a + m.d);
    const complexd half_diff = 0.5 * (m.a - m.d);
    const complexd q = std::sqrt(half_diff * half_diff + m.b * m.c);
    const Mat2c dev{m.a - mu, m.b, m.c, m.d - mu};

    const complexd emu = std::exp(mu * tau);
    const complexd qt = q * tau;
    if (std::abs(qt) < 1e-6) {
        // Near-degenerate eigenvalues: Jordan-form limit with the leading
        // series corrections in (q tau)^2.
        const complexd qt2 = qt * qt;
        const complexd ch = 1.0 + qt2 / 2.0;
        const complexd sh_over_q = tau * (1.0 + qt2 / 6.0);
        return {emu * (ch + sh_over_q * dev.a), emu * sh_over_q * dev.b,
                emu * sh_over_q * dev.c, emu * (ch + sh_over_q * dev.d)};
    }
    const complexd ch = std::cosh(qt);
    const complexd sh_over_q = std::sinh(qt) / q;
    return {emu * (ch + sh_over_q * dev.a), emu * sh_over_q * dev.b,
            emu * sh_over_q * dev.c, emu * (ch + sh_over_q * dev.d)};
}

Mat2c regression_propagator(const SystemParams& params, double tau) {
    if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
    using namespace std::complex_literals;
    const Mat2c m{
        -(1.0i * params.omega_c.rad_per_s() + params.kappa.rad_per_s()),
        complexd(params.g.rad_per_s()),
        complexd(-params.g.rad_per_s()),
        -(1.0i * params.omega_d.rad_per_s() + 0.5 * params.gamma_s.rad_per_s() +
          params.gamma_p.rad_per_s())};
    return expm_2x2(m, tau);
}

complexd CorrelationSet::c_cc(double omega) const {
    using namespace std::complex_literals;
    const double g = params.g.rad_per_s();
    const double kappa = params.kappa.rad_per_s();
    const double gp = params.gamma_p.rad_per_s();
    const double gs = params.gamma_s.rad_per_s();
    const double delta = omega - params.omega_c.rad_per_s();
    return g * g / (gp * gs * kappa) / (1.0i * delta + kappa);
}

complexd CorrelationSet::c_dd(double) const {
    return 1.0 /
           (params.gamma_p.rad_per_s() * params.gamma_s.rad_per_s());
}

complexd CorrelationSet::c_cd(double) const { return 0.0; }

complexd CorrelationSet::c_dc(double omega) const {
    using namespace std::complex_literals;
    const double g = params.g.rad_per_s();
    const double kappa = params.kappa.rad_per_s();
    const double gp = params.gamma_p.rad_per_s();
    const double gs = params.gamma_s.rad_per_s();
    const double delta = omega - params.omega_c.rad_per_s();
    return g / (gp * gs) / (1.0i * delta + kappa);
}

CorrelationSet closed_form_correlations(const SystemParams& params) {
    params.validate();
    if (!(params.gamma_p.rad_per_s() > 0.0) ||
        !(params.gamma_s.rad_per_s() > 0.0) ||
        !(params.kappa.rad_per_s() > 0.0))
        throw std::invalid_argument(
            "closed forms require kappa, gamma_s, gamma_p > 0");
    return CorrelationSet{params};
}

NumericSpectrumResult numeric_spectrum(const SystemParams& params,
                                       const CollectionChannel& channel,
                                       std::span<const double> omega_grid,
                                       const NumericSpectrumOptions& options) {
    using namespace std::complex_literals;
    params.validate();
    channel.validate();
    if (omega_grid.empty()) throw std::invalid_argument("empty omega grid");

    const double decay = min_nonzero_decay(params);
    if (!std::isfinite(decay))
        throw std::runtime_error(
            "numeric_spectrum: system has no decay channel; spectrum "
            "undefined");

    // Exact time integrals of the equal-time moment block: A J = -m(0).
    const MomentOde ode(params);
    MomentIntegrals ints{};
    {
        std::vector<double> a = ode.drift();
        std::vector<double> b = {0.0, -1.0, 0.0, 0.0};
        try {
            detail::solve_dense_inplace(a, b, 4);
        } catch (const std::runtime_error&) {
            throw std::runtime_error(
                "numeric_spectrum: undamped moment system");
        }
        ints.p_c = b[0];
        ints.p_d = b[1];
        ints.x_cross = complexd(b[2], b[3]);
    }

    const double kappa = params.kappa.rad_per_s();
    const double gamma_s = params.gamma_s.rad_per_s();
    const double g = params.g.rad_per_s();
    const double theta_sigma = 0.5 * gamma_s + params.gamma_p.rad_per_s();
    const double delta_dc =
        params.omega_d.rad_per_s() - params.omega_c.rad_per_s();

    const complexd w_d =
        channel.eps_d * std::exp(-1.0i * channel.phi_d) * std::sqrt(gamma_s);
    const complexd w_c = channel.eps_c * std::exp(-1.0i * channel.phi_c) *
                         std::sqrt(2.0 * kappa);

    // Half-plane (t' >= t) transforms: I_XY(delta) = [R(delta) J_X]_Y with
    // R = (i delta I - M)^-1 the integrated tau-propagator and J_X the time
    // integrals of the equal-time moment vectors.
    const std::array<complexd, 2> j_d{std::conj(ints.x_cross), ints.p_d};
    const std::array<complexd, 2> j_c{complexd(ints.p_c), ints.x_cross};

    NumericSpectrumResult result;
    result.total_emission = gamma_s * ints.p_d + 2.0 * kappa * ints.p_c;
    result.trace.axis = TraceAxis::detuning_hz;
    result.trace.omega_ref = params.omega_c.rad_per_s();
    result.trace.abscissa.resize(omega_grid.size());
    result.trace.intensity.resize(omega_grid.size());

    detail::parallel_for(
        omega_grid.size(), options.threads, [&](std::size_t i) {
            const double delta = omega_grid[i] - params.omega_c.rad_per_s();
            // (i delta I - M) for the rotating-frame drift matrix
            // M = [[-kappa, g], [-g, -(i delta_dc + theta_sigma)]].
            const complexd r00 = 1.0i * delta + kappa;
            const complexd r01 = complexd(-g);
            const complexd r10 = complexd(g);
            const complexd r11 = 1.0i * (delta + delta_dc) + theta_sigma;
            const complexd det = r00 * r11 - r01 * r10;

            const auto resolve = [&](const std::array<complexd, 2>& v)
                -> std::array<complexd, 2> {
                return {(r11 * v[0] - r01 * v[1]) / det,
                        (-r10 * v[0] + r00 * v[1]) / det};
            };
            const auto rd = resolve(j_d);  // (I_dc, I_dd)
            const auto rc = resolve(j_c);  // (I_cc, I_cd)

            const double s =
                std::real(std::norm(w_d) * rd[1] + std::conj(w_d) * w_c * rd[0] +
                          std::conj(w_c) * w_d * rc[1] + std::norm(w_c) * rc[0]);
            result.trace.abscissa[i] = delta / two_pi;
            result.trace.intensity[i] = s;
        });

    result.trace.validate();
    return result;
}

}  // namespace fanocqed
