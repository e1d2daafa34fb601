#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fanocqed/backscatter.hpp"
#include "fanocqed/constants.hpp"
#include "fanocqed/fit.hpp"

using namespace fanocqed;

namespace {

// Single-mode lens window on a detuning axis: kappa/2pi = 15 GHz, F_o = 0.2
// unless overridden.
MultiModeModel lens_model(double f_o = 0.2, double kappa_hz = 15e9,
                          double center_hz = 0.0, double scale = 1.0) {
    MultiModeModel m;
    m.eps_d = 1.0;
    m.phi_d = pi / 2;
    m.scale = scale;
    CavityModeTerm mode;
    mode.omega_c = AngularFrequency::from_hz_over_2pi(center_hz);
    mode.kappa = Rate::from_hz_over_2pi(kappa_hz);
    mode.f_o = f_o;
    mode.eps_c = 1.0;
    mode.phi_c = 0.0;
    m.modes.push_back(mode);
    return m;
}

TraceGrid detuning_grid(double span_hz = 150e9, std::size_t n = 801) {
    TraceGrid g;
    g.axis = TraceAxis::detuning_hz;
    g.omega_ref = 0.0;
    g.abscissa = linspace(-span_hz, span_hz, n);
    return g;
}

FitProblem lens_problem(const SpectrumTrace& trace,
                        const MultiModeModel& guess) {
    FitProblem prob;
    prob.trace = trace;
    prob.model = guess;
    prob.scale.free = true;
    prob.mode_toggles.resize(1);
    prob.mode_toggles[0].omega_c.free = true;
    prob.mode_toggles[0].kappa.free = true;
    prob.mode_toggles[0].f_o.free = true;
    return prob;
}

MultiModeModel perturbed(const MultiModeModel& truth) {
    MultiModeModel guess = truth;
    guess.modes[0].kappa =
        Rate::from_rad_per_s(truth.modes[0].kappa.rad_per_s() * 1.4);
    guess.modes[0].f_o = truth.modes[0].f_o * 0.6;
    guess.modes[0].omega_c = AngularFrequency::from_rad_per_s(
        truth.modes[0].omega_c.rad_per_s() +
        0.3 * truth.modes[0].kappa.rad_per_s());
    guess.scale = truth.scale * 1.2;
    return guess;
}

}  // namespace

TEST_CASE("convolution basics") {
    const auto model = lens_model();
    const auto grid = detuning_grid();
    const auto trace = synthesize(model, {1.0}, {}, {}, grid);

    SUBCASE("no response is the identity") {
        const auto out = convolve_response(trace, InstrumentResponse{});
        for (std::size_t i = 0; i < trace.size(); ++i)
            CHECK(out.intensity[i] == trace.intensity[i]);
    }
    SUBCASE("flat trace stays flat") {
        auto flat = trace;
        for (auto& v : flat.intensity) v = 2.5;
        InstrumentResponse r;
        r.kind = InstrumentResponse::Kind::gaussian;
        r.fwhm = 20e-12;
        r.lambda_ref = 680e-9;
        const auto out = convolve_response(flat, r);
        for (double v : out.intensity)
            CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
    }
    SUBCASE("kernel wider than the window is rejected") {
        InstrumentResponse r;
        r.kind = InstrumentResponse::Kind::gaussian;
        r.fwhm = 2e-6;
        r.lambda_ref = 680e-9;
        CHECK_THROWS_AS(convolve_response(trace, r), std::invalid_argument);
    }
}

TEST_CASE("narrow line convolved with the response takes the response width") {
    // pure cavity channel, kappa/2pi = 0.2 GHz against a 20 pm (~13 GHz at
    // 680 nm) response: the smeared line takes the instrument width
    auto model = lens_model(50.0, 0.2e9);
    model.eps_d = 0.0;
    TraceGrid grid = detuning_grid(400e9, 12001);
    const auto trace = synthesize(model, {1.0}, {}, {}, grid);

    InstrumentResponse r;
    r.kind = InstrumentResponse::Kind::gaussian;
    r.fwhm = 20e-12;
    r.lambda_ref = 680e-9;
    const double fwhm_hz = r.fwhm * c_light / (r.lambda_ref * r.lambda_ref);

    const auto out = convolve_response(trace, r);

    // integral preservation (feature well inside the window)
    const double h = grid.abscissa[1] - grid.abscissa[0];
    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        before += trace.intensity[i] * h;
        after += out.intensity[i] * h;
    }
    CHECK(after == doctest::Approx(before).epsilon(1e-6));

    // grid-measured FWHM of the smeared peak
    double peak = 0.0;
    std::size_t ipk = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.intensity[i] > peak) { peak = out.intensity[i]; ipk = i; }
    const double half = 0.5 * peak;
    std::size_t lo = ipk, hi = ipk;
    while (lo > 0 && out.intensity[lo] > half) --lo;
    while (hi + 1 < out.size() && out.intensity[hi] > half) ++hi;
    const double measured = grid.abscissa[hi] - grid.abscissa[lo];
    CHECK(measured == doctest::Approx(fwhm_hz).epsilon(0.05));
}

TEST_CASE("convolution commutes with abscissa shift") {
    const auto model = lens_model();
    auto grid = detuning_grid();
    const auto base = synthesize(model, {1.0}, {}, {}, grid);

    InstrumentResponse r;
    r.kind = InstrumentResponse::Kind::gaussian;
    r.fwhm = 20e-12;
    r.lambda_ref = 680e-9;
    const auto conv = convolve_response(base, r);

    auto shifted = base;
    for (auto& x : shifted.abscissa) x += 37e9;
    const auto conv_shift = convolve_response(shifted, r);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(conv_shift.intensity[i] ==
              doctest::Approx(conv.intensity[i]).epsilon(1e-12));
}

TEST_CASE("synthesize determinism") {
    const auto model = lens_model();
    const auto grid = detuning_grid();
    NoiseSpec noise;
    noise.kind = NoiseSpec::Kind::multiplicative;
    noise.level = 0.01;
    noise.seed = 1234;

    const auto a = synthesize(model, {1.0}, {}, noise, grid);
    const auto b = synthesize(model, {1.0}, {}, noise, grid);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.intensity[i] == b.intensity[i]);

    noise.seed = 1235;
    const auto c = synthesize(model, {1.0}, {}, noise, grid);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.intensity[i] != c.intensity[i]) ++differing;
    CHECK(differing > a.size() / 2);

    NoiseSpec none;
    const auto clean = synthesize(model, {1.0}, {}, none, grid);
    for (std::size_t i = 0; i < clean.size(); ++i)
        CHECK(clean.intensity[i] ==
              doctest::Approx(model.intensity(clean.omega_at(i)))
                  .epsilon(1e-14));
}

TEST_CASE("zero-noise lens fit recovers the parameters to < 0.1%") {
    const auto truth = lens_model();
    const auto trace = synthesize(truth, {1.0}, {}, {}, detuning_grid());
    auto prob = lens_problem(trace, perturbed(truth));
    const auto res = fit(prob);

    CHECK(res.converged);
    CHECK(res.residual_norm <= res.initial_residual_norm);
    CHECK(res.parameter("modes.0.kappa") ==
          doctest::Approx(truth.modes[0].kappa.rad_per_s()).epsilon(1e-3));
    CHECK(res.parameter("modes.0.f_o") ==
          doctest::Approx(0.2).epsilon(1e-3));
    CHECK(std::abs(res.parameter("modes.0.omega_c") -
                   truth.modes[0].omega_c.rad_per_s()) <
          1e-3 * truth.modes[0].kappa.rad_per_s());
    CHECK(res.parameter("scale") == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fit gradient vanishes at the optimum") {
    const auto truth = lens_model();
    NoiseSpec noise;
    noise.kind = NoiseSpec::Kind::multiplicative;
    noise.level = 0.01;
    noise.seed = 99;
    const auto trace = synthesize(truth, {1.0}, {}, noise, detuning_grid());
    auto prob = lens_problem(trace, perturbed(truth));
    const auto res = fit(prob);
    CHECK(res.converged);

    // central finite differences of ||r|| along each free direction,
    // multiplicative steps for the log-space parameters
    const auto cost = [&](const MultiModeModel& m) {
        const auto pred = predict(prob, m, prob.background);
        double c = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = pred[i] - trace.intensity[i];
            c += d * d;
        }
        return std::sqrt(c);
    };
    const double r0 = cost(res.model);
    const double tol = 1e-4;  // FD noise floor is well above the LM tolerance
    {
        auto up = res.model, dn = res.model;
        up.modes[0].kappa =
            Rate::from_rad_per_s(res.model.modes[0].kappa.rad_per_s() *
                                 (1.0 + 1e-6));
        dn.modes[0].kappa =
            Rate::from_rad_per_s(res.model.modes[0].kappa.rad_per_s() *
                                 (1.0 - 1e-6));
        CHECK(std::abs(cost(up) - cost(dn)) / (2e-6) < tol * (1.0 + r0));
    }
    {
        auto up = res.model, dn = res.model;
        up.modes[0].f_o *= 1.0 + 1e-6;
        dn.modes[0].f_o *= 1.0 - 1e-6;
        CHECK(std::abs(cost(up) - cost(dn)) / (2e-6) < tol * (1.0 + r0));
    }
}

TEST_CASE("noisy recovery: 1% multiplicative noise, seed sweep") {
    const auto truth = lens_model();
    const auto grid = detuning_grid();
    double acc_k = 0.0, acc_f = 0.0;
    const int n_seeds = 12;
    for (int seed = 0; seed < n_seeds; ++seed) {
        NoiseSpec noise;
        noise.kind = NoiseSpec::Kind::multiplicative;
        noise.level = 0.01;
        noise.seed = 1000 + seed;
        const auto trace = synthesize(truth, {1.0}, {}, noise, grid);
        auto prob = lens_problem(trace, perturbed(truth));
        const auto res = fit(prob);
        REQUIRE(res.converged);
        const double ek = res.parameter("modes.0.kappa") /
                              truth.modes[0].kappa.rad_per_s() - 1.0;
        const double ef = res.parameter("modes.0.f_o") / 0.2 - 1.0;
        acc_k += ek * ek;
        acc_f += ef * ef;

        // reported error bars should be of the right order
        const double sk = res.error_of("modes.0.kappa") /
                          truth.modes[0].kappa.rad_per_s();
        CHECK(sk > 1e-5);
        CHECK(sk < 0.05);
    }
    CHECK(std::sqrt(acc_k / n_seeds) < 0.02);
    CHECK(std::sqrt(acc_f / n_seeds) < 0.02);
}

TEST_CASE("scale equivariance: intensity units do not move kappa or F_o") {
    const auto truth = lens_model();
    NoiseSpec noise;
    noise.kind = NoiseSpec::Kind::multiplicative;
    noise.level = 0.005;
    noise.seed = 7;
    auto trace = synthesize(truth, {1.0}, {}, noise, detuning_grid());
    auto prob = lens_problem(trace, perturbed(truth));
    const auto res1 = fit(prob);

    for (auto& v : prob.trace.intensity) v *= 170.0;
    prob.model.scale *= 170.0;
    const auto res2 = fit(prob);

    CHECK(res2.parameter("scale") ==
          doctest::Approx(res1.parameter("scale") * 170.0).epsilon(1e-6));
    CHECK(res2.parameter("modes.0.kappa") ==
          doctest::Approx(res1.parameter("modes.0.kappa")).epsilon(1e-6));
    CHECK(res2.parameter("modes.0.f_o") ==
          doctest::Approx(res1.parameter("modes.0.f_o")).epsilon(1e-6));
    CHECK(std::abs(res2.parameter("modes.0.omega_c") -
                   res1.parameter("modes.0.omega_c")) <
          1e-6 * res1.parameter("modes.0.kappa"));
}

TEST_CASE("all-frozen problem degenerates to a residual report") {
    const auto truth = lens_model();
    const auto trace = synthesize(truth, {1.0}, {}, {}, detuning_grid());
    FitProblem prob;
    prob.trace = trace;
    prob.model = truth;
    prob.mode_toggles.resize(1);
    const auto res = fit(prob);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.residual_norm == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("noise level raises recovered-parameter RMS error monotonically") {
    const auto truth = lens_model();
    const auto grid = detuning_grid(150e9, 401);
    std::vector<double> rms;
    for (double level : {0.002, 0.01, 0.05}) {
        double acc = 0.0;
        const int n_seeds = 8;
        for (int seed = 0; seed < n_seeds; ++seed) {
            NoiseSpec noise;
            noise.kind = NoiseSpec::Kind::multiplicative;
            noise.level = level;
            noise.seed = 50 + seed;
            const auto trace = synthesize(truth, {1.0}, {}, noise, grid);
            auto prob = lens_problem(trace, perturbed(truth));
            const auto res = fit(prob);
            const double ek = res.parameter("modes.0.kappa") /
                                  truth.modes[0].kappa.rad_per_s() - 1.0;
            const double ef = res.parameter("modes.0.f_o") / 0.2 - 1.0;
            acc += ek * ek + ef * ef;
        }
        rms.push_back(std::sqrt(acc / n_seeds));
    }
    CHECK(rms[0] < rms[1]);
    CHECK(rms[1] < rms[2]);
}

TEST_CASE("doublet transmission round-trips through the fitter") {
    // Standing-wave doublet of the 852 nm TE_p1 mode: split from the
    // backscatter model, loaded Qs from doublet_loss.
    ModeGeometry mode;
    mode.polarization = Polarization::TE;
    mode.p = 1;
    mode.m = 93;
    mode.lambda0 = 852e-9;
    mode.n_disk = 1.45;
    mode.v_eff_sw = 43.0;
    mode.eta_s = 0.073;
    mode.eta_nc = 0.024;
    Scatterer sc;
    sc.n_nc = 2.4;
    sc.v_nc = sphere_volume(200e-9);
    sc.eta_at_site = 0.024;

    const auto bs = backscatter(mode, sc);
    const auto dl = doublet_loss(3.4e5, 3.4e5);
    const double w0 = mode.omega0().rad_per_s();
    const double wm = bs.omega_minus.rad_per_s();
    const double wp = bs.omega_plus.rad_per_s();
    const double kappa_m = wm / (2.0 * dl.q_low);
    const double kappa_p = wp / (2.0 * dl.q_high);
    const double d_minus = 0.7, d_plus = 0.4;

    const auto omega_grid = linspace(w0 - 6.0 * (wp - wm),
                                     w0 + 6.0 * (wp - wm), 3001);
    const auto trace =
        doublet_transmission(omega_grid, bs.omega_minus, bs.omega_plus,
                             dl.q_low, dl.q_high, d_minus, d_plus, 0.0);

    // two-mode Fano model with the cavity term in antiphase: a Lorentzian
    // dip of depth d is |1 - a L|^2 with a = 1 - sqrt(1 - d)
    MultiModeModel guess;
    guess.eps_d = 1.0;
    guess.phi_d = 0.0;
    guess.scale = 1.0;
    for (int k = 0; k < 2; ++k) {
        CavityModeTerm m;
        const double w = k == 0 ? wm : wp;
        const double kap = k == 0 ? kappa_m : kappa_p;
        const double dep = k == 0 ? d_minus : d_plus;
        const double a = 1.0 - std::sqrt(1.0 - dep);
        m.omega_c =
            AngularFrequency::from_rad_per_s(w + (k == 0 ? 0.5 : -0.5) * kap);
        m.kappa = Rate::from_rad_per_s(kap * 1.15);
        m.f_o = a * a * 0.8;
        m.eps_c = 1.0;
        m.phi_c = pi;
        guess.modes.push_back(m);
    }

    FitProblem prob;
    prob.trace = trace;
    prob.model = guess;
    prob.mode_toggles.resize(2);
    for (auto& t : prob.mode_toggles) {
        t.omega_c.free = true;
        t.kappa.free = true;
        t.f_o.free = true;
    }
    const auto res = fit(prob);
    REQUIRE(res.converged);

    const double rec_wm = res.parameter("modes.0.omega_c");
    const double rec_wp = res.parameter("modes.1.omega_c");
    const double rec_km = res.parameter("modes.0.kappa");
    const double rec_kp = res.parameter("modes.1.kappa");
    const double rec_dm = 2.0 * std::sqrt(res.parameter("modes.0.f_o")) -
                          res.parameter("modes.0.f_o");
    const double rec_dp = 2.0 * std::sqrt(res.parameter("modes.1.f_o")) -
                          res.parameter("modes.1.f_o");

    CHECK(std::abs(rec_wm - wm) / (wp - wm) < 0.01);
    CHECK(std::abs(rec_wp - wp) / (wp - wm) < 0.01);
    CHECK(rec_km == doctest::Approx(kappa_m).epsilon(0.01));
    CHECK(rec_kp == doctest::Approx(kappa_p).epsilon(0.01));
    CHECK(rec_dm == doctest::Approx(d_minus).epsilon(0.01));
    CHECK(rec_dp == doctest::Approx(d_plus).epsilon(0.01));
    // recovered loaded quality factors
    CHECK(rec_wm / (2.0 * rec_km) == doctest::Approx(dl.q_low).epsilon(0.01));
    CHECK(rec_wp / (2.0 * rec_kp) == doctest::Approx(dl.q_high).epsilon(0.01));
}

TEST_CASE("well-separated two-mode window recovers all free parameters") {
    MultiModeModel truth;
    truth.eps_d = 1.0;
    truth.phi_d = pi / 2;
    truth.scale = 1.0;
    CavityModeTerm a;
    a.omega_c = AngularFrequency::from_hz_over_2pi(-90e9);
    a.kappa = Rate::from_hz_over_2pi(12e9);
    a.f_o = 0.25;
    CavityModeTerm b;
    b.omega_c = AngularFrequency::from_hz_over_2pi(110e9);
    b.kappa = Rate::from_hz_over_2pi(20e9);
    b.f_o = 0.06;
    truth.modes = {a, b};

    TraceGrid grid;
    grid.axis = TraceAxis::detuning_hz;
    grid.abscissa = linspace(-280e9, 280e9, 1201);

    double worst = 0.0;
    for (int seed = 0; seed < 6; ++seed) {
        NoiseSpec noise;
        noise.kind = NoiseSpec::Kind::multiplicative;
        noise.level = 0.01;
        noise.seed = 300 + static_cast<std::uint64_t>(seed);
        const auto trace = synthesize(truth, {1.0}, {}, noise, grid);

        FitProblem prob;
        prob.trace = trace;
        prob.model = truth;
        for (auto& m : prob.model.modes) {
            m.kappa = Rate::from_rad_per_s(m.kappa.rad_per_s() * 1.25);
            m.f_o *= 0.75;
            m.omega_c = AngularFrequency::from_rad_per_s(
                m.omega_c.rad_per_s() + 0.3 * m.kappa.rad_per_s());
        }
        prob.model.scale = 1.15;
        prob.scale.free = true;
        prob.mode_toggles.resize(2);
        for (auto& t : prob.mode_toggles) {
            t.omega_c.free = true;
            t.kappa.free = true;
            t.f_o.free = true;
        }
        const auto res = fit(prob);
        REQUIRE(res.converged);
        for (int k = 0; k < 2; ++k) {
            const auto& tm = truth.modes[k];
            const std::string base = "modes." + std::to_string(k) + ".";
            worst = std::max(worst,
                             std::abs(res.parameter(base + "kappa") /
                                          tm.kappa.rad_per_s() - 1.0));
            worst = std::max(worst, std::abs(res.parameter(base + "f_o") /
                                                 tm.f_o - 1.0));
            worst = std::max(
                worst, std::abs(res.parameter(base + "omega_c") -
                                tm.omega_c.rad_per_s()) /
                           tm.kappa.rad_per_s());
        }
        worst = std::max(worst, std::abs(res.parameter("scale") - 1.0));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("doublet lock ties the pair parameters") {
    const double split_hz = 30e9;
    MultiModeModel truth;
    truth.eps_d = 1.0;
    truth.phi_d = pi / 2;
    CavityModeTerm a;
    a.omega_c = AngularFrequency::from_hz_over_2pi(-15e9);
    a.kappa = Rate::from_hz_over_2pi(12e9);
    a.f_o = 0.15;
    CavityModeTerm b = a;
    b.omega_c = AngularFrequency::from_hz_over_2pi(-15e9 + split_hz);
    b.f_o = 0.08;
    truth.modes = {a, b};

    const auto trace = synthesize(truth, {1.0}, {}, {}, detuning_grid());

    FitProblem prob;
    prob.trace = trace;
    prob.model = truth;
    prob.model.modes[0].kappa = Rate::from_hz_over_2pi(9e9);
    prob.model.modes[0].f_o = 0.3;
    prob.model.modes[1].f_o = 0.05;
    prob.mode_toggles.resize(2);
    prob.mode_toggles[0].omega_c.free = true;
    prob.mode_toggles[0].kappa.free = true;
    prob.mode_toggles[0].f_o.free = true;
    prob.mode_toggles[1].f_o.free = true;
    prob.doublet_lock.enabled = true;
    prob.doublet_lock.splitting = two_pi * split_hz;

    const auto res = fit(prob);
    REQUIRE(res.converged);
    CHECK(res.parameter("modes.1.omega_c") -
              res.parameter("modes.0.omega_c") ==
          doctest::Approx(two_pi * split_hz).epsilon(1e-12));
    CHECK(res.parameter("modes.1.kappa") ==
          doctest::Approx(res.parameter("modes.0.kappa")).epsilon(1e-12));
    CHECK(res.parameter("modes.0.kappa") ==
          doctest::Approx(two_pi * 12e9).epsilon(1e-3));
    CHECK(res.parameter("modes.0.f_o") == doctest::Approx(0.15).epsilon(1e-3));
    CHECK(res.parameter("modes.1.f_o") == doctest::Approx(0.08).epsilon(1e-3));
}

TEST_CASE("seed_from_extremum finds the strongest feature") {
    const auto model = lens_model(4.0, 15e9, 20e9);
    const auto trace = synthesize(model, {1.0}, {}, {}, detuning_grid());
    const auto seed = seed_from_extremum(trace);
    CHECK(seed.is_peak);
    CHECK(std::abs(seed.center - 20e9) < 20e9);
    CHECK(seed.width > 1e9);
    CHECK(seed.width < 200e9);
}
