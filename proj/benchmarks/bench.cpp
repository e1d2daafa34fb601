#include <benchmark/benchmark.h>

#include <cmath>

#include "fanocqed/backscatter.hpp"
#include "fanocqed/constants.hpp"
#include "fanocqed/coupling.hpp"
#include "fanocqed/dynamics.hpp"
#include "fanocqed/fit.hpp"
#include "fanocqed/spectrum.hpp"

using namespace fanocqed;

namespace {

SystemParams device_params() {
    SystemParams p;
    p.kappa = Rate::from_hz_over_2pi(15e9);
    p.gamma_s = Rate::from_hz_over_2pi(0.5e6);
    p.g = g_from_purcell(0.2, p.kappa, p.gamma_s);
    p.gamma_p = Rate::from_hz_over_2pi(1e13);
    p.omega_c = wavelength_to_angular(680e-9);
    p.omega_d = p.omega_c;
    return p;
}

void BM_LensSpectrum(benchmark::State& state) {
    const auto kappa = Rate::from_hz_over_2pi(15e9);
    const auto grid = linspace(-20.0 * kappa.rad_per_s(),
                               20.0 * kappa.rad_per_s(),
                               static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(lens_spectrum(0.2, kappa, grid));
}

void BM_MultiModeSpectrum(benchmark::State& state) {
    MultiModeModel model;
    model.eps_d = 1.0;
    model.phi_d = pi / 2;
    const double wc = wavelength_to_angular(680e-9).rad_per_s();
    for (int k = 0; k < 5; ++k) {
        CavityModeTerm m;
        m.omega_c = AngularFrequency::from_rad_per_s(wc + k * 4e11);
        m.kappa = Rate::from_hz_over_2pi(15e9 + 5e9 * k);
        m.f_o = 0.05 + 0.04 * k;
        model.modes.push_back(m);
    }
    const auto grid = linspace(wc - 4e11, wc + 2.4e12,
                               static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(multimode_spectrum(model, grid, wc));
}

void BM_MomentEvolution(benchmark::State& state) {
    // moderate stiffness; the explicit solver resolves the fastest moment
    SystemParams p;
    p.kappa = Rate::from_hz_over_2pi(15e9);
    p.gamma_s = Rate::from_hz_over_2pi(3e9);
    p.g = Rate::from_hz_over_2pi(5e9);
    p.gamma_p = Rate::from_hz_over_2pi(3e12);
    p.omega_c = wavelength_to_angular(680e-9);
    p.omega_d = p.omega_c;
    const auto grid = linspace(0.0, 10.0 / p.gamma_s.rad_per_s(), 101);
    for (auto _ : state)
        benchmark::DoNotOptimize(moment_evolution(p, grid, 1e-9, 1e-13));
}

void BM_NumericSpectrum(benchmark::State& state) {
    const auto p = device_params();
    const double wc = p.omega_c.rad_per_s();
    const double k = p.kappa.rad_per_s();
    const auto grid = linspace(wc - 15.0 * k, wc + 15.0 * k,
                               static_cast<std::size_t>(state.range(0)));
    const CollectionChannel lens{1.0, 1.0, pi / 2, 0.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(numeric_spectrum(p, lens, grid));
}

void BM_Backscatter(benchmark::State& state) {
    ModeGeometry m;
    m.polarization = Polarization::TE;
    m.p = 1;
    m.m = 93;
    m.lambda0 = 852e-9;
    m.n_disk = 1.45;
    m.v_eff_sw = 43.0;
    m.eta_s = 0.073;
    m.eta_nc = 0.024;
    Scatterer sc;
    sc.n_nc = 2.4;
    sc.v_nc = sphere_volume(200e-9);
    sc.eta_at_site = 0.024;
    for (auto _ : state) {
        benchmark::DoNotOptimize(backscatter(m, sc));
        benchmark::DoNotOptimize(scattering_q(m, sc));
    }
}

void BM_FitLensWindow(benchmark::State& state) {
    MultiModeModel truth;
    truth.eps_d = 1.0;
    truth.phi_d = pi / 2;
    CavityModeTerm mode;
    mode.omega_c = AngularFrequency::from_hz_over_2pi(0.0);
    mode.kappa = Rate::from_hz_over_2pi(15e9);
    mode.f_o = 0.2;
    truth.modes.push_back(mode);
    TraceGrid grid;
    grid.axis = TraceAxis::detuning_hz;
    grid.abscissa = linspace(-150e9, 150e9, 401);
    NoiseSpec noise;
    noise.kind = NoiseSpec::Kind::multiplicative;
    noise.level = 0.01;
    noise.seed = 11;
    const auto trace = synthesize(truth, {1.0}, {}, noise, grid);

    for (auto _ : state) {
        FitProblem prob;
        prob.trace = trace;
        prob.model = truth;
        prob.model.modes[0].kappa = Rate::from_hz_over_2pi(20e9);
        prob.model.modes[0].f_o = 0.15;
        prob.scale.free = true;
        prob.mode_toggles.resize(1);
        prob.mode_toggles[0].omega_c.free = true;
        prob.mode_toggles[0].kappa.free = true;
        prob.mode_toggles[0].f_o.free = true;
        benchmark::DoNotOptimize(fit(prob));
    }
}

}  // namespace

BENCHMARK(BM_LensSpectrum)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_MultiModeSpectrum)->Arg(1 << 12);
BENCHMARK(BM_MomentEvolution);
BENCHMARK(BM_NumericSpectrum)->Arg(201)->Arg(801);
BENCHMARK(BM_Backscatter);
BENCHMARK(BM_FitLensWindow);

BENCHMARK_MAIN();
