#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "fanocqed/constants.hpp"
#include "fanocqed/spectrum.hpp"

using namespace fanocqed;

namespace {

SystemParams tm_p3_system(double gamma_p_hz = 1e13) {
    SystemParams p;
    p.kappa = Rate::from_hz_over_2pi(15e9);
    p.gamma_s = Rate::from_hz_over_2pi(0.5e6);
    p.g = Rate::from_hz_over_2pi(27.386e6);  // F_o ~ 0.2
    p.gamma_p = Rate::from_hz_over_2pi(gamma_p_hz);
    p.omega_c = wavelength_to_angular(680e-9);
    p.omega_d = p.omega_c;
    return p;
}

}  // namespace

TEST_CASE("detected spectrum limits") {
    const auto p = tm_p3_system();
    const double wc = p.omega_c.rad_per_s();
    const double kappa = p.kappa.rad_per_s();

    SUBCASE("no cavity channel gives the flat dipole background") {
        CollectionChannel ch{1.0, 0.0, 0.3, 0.0};
        const auto grid = linspace(wc - 30 * kappa, wc + 30 * kappa, 401);
        const auto s = detected_spectrum(p, ch, grid);
        for (double v : s.intensity)
            CHECK(v == doctest::Approx(1.0 / p.gamma_p.rad_per_s())
                           .epsilon(1e-12));
    }
    SUBCASE("pure cavity channel is a Lorentzian of half-width kappa") {
        CollectionChannel ch{0.0, 1.0, 0.0, 0.0};
        const double s0 = detected_spectrum_at(p, ch, wc);
        const double shw = detected_spectrum_at(p, ch, wc + kappa);
        CHECK(shw == doctest::Approx(0.5 * s0).epsilon(1e-12));
        const double far = detected_spectrum_at(p, ch, wc + 100 * kappa);
        CHECK(far < 2e-4 * s0);
    }
    SUBCASE("far-detuned spectrum recovers the dipole background") {
        CollectionChannel ch{1.0, 1.0, pi / 2, 0.0};
        const double bg = 1.0 / p.gamma_p.rad_per_s();
        const double far = detected_spectrum_at(p, ch, wc + 1e6 * kappa);
        CHECK(far == doctest::Approx(bg).epsilon(1e-5));
    }
}

TEST_CASE("lens spectrum equals the detected spectrum at phi_d-phi_c=pi/2") {
    const auto p = tm_p3_system();
    const double wc = p.omega_c.rad_per_s();
    const double kappa = p.kappa.rad_per_s();
    const CollectionChannel lens_ch{1.0, 1.0, pi / 2, 0.0};
    const double f_o = 2.0 * std::pow(p.g.rad_per_s(), 2) /
                       (kappa * p.gamma_s.rad_per_s());

    const auto dgrid = linspace(-25 * kappa, 25 * kappa, 803);
    const auto lens = lens_spectrum(f_o, p.kappa, dgrid);
    const double bg = 1.0 / p.gamma_p.rad_per_s();
    for (std::size_t i = 0; i < dgrid.size(); ++i) {
        const double det = detected_spectrum_at(p, lens_ch, wc + dgrid[i]);
        CHECK(det / bg ==
              doctest::Approx(lens.intensity[i]).epsilon(1e-12));
    }
}

TEST_CASE("lens peak-to-background on resonance is 1 + F_o") {
    const auto kappa = Rate::from_hz_over_2pi(15e9);
    for (double f : {0.0, 0.02, 0.2, 2.0})
        CHECK(lens_spectrum_at(f, kappa, 0.0) ==
              doctest::Approx(1.0 + f).epsilon(1e-14));
}

TEST_CASE("lens lineshape geometry for F_o = 0.2") {
    const auto kappa = Rate::from_hz_over_2pi(15e9);
    const double k = kappa.rad_per_s();
    const auto ex = lens_extrema(0.2);
    CHECK(ex.x_max == doctest::Approx(0.8010883).epsilon(1e-6));
    CHECK(ex.x_min == doctest::Approx(-1.2483019).epsilon(1e-6));
    CHECK(ex.x_cross == doctest::Approx(-std::sqrt(0.2) / 2).epsilon(1e-12));

    CHECK(lens_spectrum_at(0.2, kappa, ex.x_max * k) ==
          doctest::Approx(1.558258).epsilon(1e-6));
    CHECK(lens_spectrum_at(0.2, kappa, ex.x_min * k) ==
          doctest::Approx(0.641742).epsilon(1e-6));
    CHECK(lens_spectrum_at(0.2, kappa, ex.x_cross * k) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // brute-force grid scan confirms the closed-form extrema
    const auto grid = linspace(-6.0 * k, 6.0 * k, 1200001);
    double smax = 0.0, smin = 1e300, xmax = 0.0, xmin = 0.0;
    for (double dw : grid) {
        const double s = lens_spectrum_at(0.2, kappa, dw);
        if (s > smax) { smax = s; xmax = dw / k; }
        if (s < smin) { smin = s; xmin = dw / k; }
    }
    CHECK(xmax == doctest::Approx(ex.x_max).epsilon(1e-4));
    CHECK(xmin == doctest::Approx(ex.x_min).epsilon(1e-4));
    CHECK(smax == doctest::Approx(1.558258).epsilon(1e-6));
    CHECK(smin == doctest::Approx(0.641742).epsilon(1e-6));
}

TEST_CASE("lens background recovery at asymptotic detuning") {
    const auto kappa = Rate::from_hz_over_2pi(15e9);
    const double k = kappa.rad_per_s();
    for (double f_o : {1e-3, 0.02, 0.2, 2.0, 10.0}) {
        // The interference tail decays as 2 sqrt(F)/x, so the 1e-3 band is
        // reached at |x| ~ 2000 sqrt(F), not at 100 kappa.
        const double x = 2.0e4;
        CHECK(std::abs(lens_spectrum_at(f_o, kappa, x * k) - 1.0) < 1e-3);
        CHECK(std::abs(lens_spectrum_at(f_o, kappa, -x * k) - 1.0) < 1e-3);
        // and the approach is monotone from 100 kappa outwards
        double prev = std::abs(lens_spectrum_at(f_o, kappa, 100.0 * k) - 1.0);
        for (double xx : {300.0, 1000.0, 3000.0, 10000.0}) {
            const double cur =
                std::abs(lens_spectrum_at(f_o, kappa, xx * k) - 1.0);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("phase flip mirrors the Fano asymmetry") {
    const auto p = tm_p3_system();
    const double wc = p.omega_c.rad_per_s();
    const double k = p.kappa.rad_per_s();
    const CollectionChannel plus{1.0, 1.0, pi / 2, 0.0};
    const CollectionChannel minus{1.0, 1.0, -pi / 2, 0.0};
    for (double x : {0.2, 0.7, 1.3, 4.0}) {
        CHECK(detected_spectrum_at(p, plus, wc + x * k) ==
              doctest::Approx(detected_spectrum_at(p, minus, wc - x * k))
                  .epsilon(1e-12));
    }
}

TEST_CASE("multimode model reduces to the single-mode forms") {
    const auto p = tm_p3_system();
    const double wc = p.omega_c.rad_per_s();
    const double k = p.kappa.rad_per_s();

    MultiModeModel model;
    model.eps_d = 1.0;
    model.phi_d = pi / 2;
    model.scale = 1.0;
    CavityModeTerm mode;
    mode.omega_c = p.omega_c;
    mode.kappa = p.kappa;
    mode.f_o = 0.2;
    mode.eps_c = 1.0;
    mode.phi_c = 0.0;
    model.modes.push_back(mode);

    const auto grid = linspace(wc - 20 * k, wc + 20 * k, 1001);
    const auto mm = multimode_spectrum(model, grid, wc);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(mm.intensity[i] ==
              doctest::Approx(lens_spectrum_at(0.2, p.kappa, grid[i] - wc))
                  .epsilon(1e-12));
    }
}

TEST_CASE("far-separated modes match single-mode lens shapes locally") {
    const double k = Rate::from_hz_over_2pi(15e9).rad_per_s();
    const double wc1 = wavelength_to_angular(680e-9).rad_per_s();
    const double wc2 = wc1 + 4.0e4 * k;

    MultiModeModel model;
    model.eps_d = 1.0;
    model.phi_d = pi / 2;
    CavityModeTerm m1, m2;
    m1.omega_c = AngularFrequency::from_rad_per_s(wc1);
    m1.kappa = Rate::from_rad_per_s(k);
    m1.f_o = 0.2;
    m2.omega_c = AngularFrequency::from_rad_per_s(wc2);
    m2.kappa = Rate::from_rad_per_s(2.0 * k);
    m2.f_o = 0.05;
    model.modes = {m1, m2};

    for (double x : {-2.0, -0.5, 0.0, 0.8, 3.0}) {
        const double w1 = wc1 + x * k;
        CHECK(model.intensity(w1) ==
              doctest::Approx(lens_spectrum_at(0.2, m1.kappa, x * k))
                  .epsilon(1e-3));
        const double w2 = wc2 + x * 2.0 * k;
        CHECK(model.intensity(w2) ==
              doctest::Approx(lens_spectrum_at(0.05, m2.kappa, x * 2.0 * k))
                  .epsilon(1e-3));
    }
}

TEST_CASE("multimode with all F_o zero is flat background") {
    MultiModeModel model;
    model.eps_d = 0.7;
    model.scale = 3.0;
    CavityModeTerm m;
    m.omega_c = wavelength_to_angular(680e-9);
    m.kappa = Rate::from_hz_over_2pi(15e9);
    m.f_o = 0.0;
    model.modes = {m, m};
    const double wc = m.omega_c.rad_per_s();
    for (double x : {-3.0, 0.0, 2.0})
        CHECK(model.intensity(wc + x * m.kappa.rad_per_s()) ==
              doctest::Approx(3.0 * 0.49).epsilon(1e-12));
}

TEST_CASE("drop filter dips") {
    const double wc = wavelength_to_angular(680e-9).rad_per_s();
    const double k = Rate::from_hz_over_2pi(15e9).rad_per_s();
    DropFilterMode m;
    m.omega_c = AngularFrequency::from_rad_per_s(wc);
    m.kappa = Rate::from_rad_per_s(k);

    SUBCASE("full depth blocks resonance, zero depth passes") {
        m.depth = 1.0;
        const std::vector<double> at{wc - 1.0, wc};
        auto t = drop_filter_spectrum({m}, at, 2.0, wc);
        CHECK(t.intensity[1] == doctest::Approx(0.0).epsilon(1e-12));
        m.depth = 0.0;
        t = drop_filter_spectrum({m}, at, 2.0, wc);
        CHECK(t.intensity[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(t.intensity[1] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("half-depth dip has FWHM 2 kappa, measured on the grid") {
        m.depth = 0.5;
        const auto grid = linspace(wc - 10 * k, wc + 10 * k, 2000001);
        const auto t = drop_filter_spectrum({m}, grid, 1.0, wc);
        // dip reaches 1 - d at center; half depth level is 1 - d/2
        const double level = 1.0 - 0.25;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (t.intensity[i - 1] >= level && t.intensity[i] < level)
                lo = 0.5 * (grid[i - 1] + grid[i]);
            if (t.intensity[i - 1] < level && t.intensity[i] >= level)
                hi = 0.5 * (grid[i - 1] + grid[i]);
        }
        CHECK(hi - lo == doctest::Approx(2.0 * k).epsilon(1e-4));
    }
    SUBCASE("depth bounds enforced") {
        m.depth = 1.5;
        const auto grid = linspace(wc - k, wc + k, 11);
        CHECK_THROWS_AS(drop_filter_spectrum({m}, grid, 1.0, wc),
                        std::invalid_argument);
    }
}

TEST_CASE("phase lag of indirect versus direct radiation") {
    const auto wc = wavelength_to_angular(680e-9);
    const auto kappa = Rate::from_hz_over_2pi(15e9);
    const double k = kappa.rad_per_s();

    SUBCASE("pi/2 on resonance") {
        const auto r = phase_lag(wc, wc, kappa);
        CHECK(std::abs(std::arg(r) - pi / 2) < 1e-9);
    }
    SUBCASE("3pi/4 one linewidth blue of the cavity") {
        const auto ws =
            AngularFrequency::from_rad_per_s(wc.rad_per_s() + k);
        const auto r = phase_lag(ws, wc, kappa);
        CHECK(std::abs(std::arg(r) - 3.0 * pi / 4) < 1e-9);
    }
    SUBCASE("pi/4 one linewidth red of the cavity") {
        const auto ws =
            AngularFrequency::from_rad_per_s(wc.rad_per_s() - k);
        const auto r = phase_lag(ws, wc, kappa);
        CHECK(std::abs(std::arg(r) - pi / 4) < 1e-9);
    }
    SUBCASE("modulus vanishes far off resonance") {
        const auto near = phase_lag(
            AngularFrequency::from_rad_per_s(wc.rad_per_s() + k), wc, kappa);
        const auto far = phase_lag(
            AngularFrequency::from_rad_per_s(wc.rad_per_s() + 1e6 * k), wc,
            kappa);
        CHECK(std::abs(far) < 1e-5 * std::abs(near));
    }
}

TEST_CASE("trace validation") {
    SpectrumTrace t;
    t.abscissa = {0.0, 1.0, 1.0};
    t.intensity = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.abscissa = {0.0, 1.0, 2.0};
    CHECK_NOTHROW(t.validate());
    t.intensity[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
