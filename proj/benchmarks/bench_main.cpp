#include <benchmark/benchmark.h>

#include "mmdoppler/fading.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/oracle.hpp"
#include "mmdoppler/quadrature.hpp"
#include "mmdoppler/spectrum.hpp"
#include "mmdoppler/train.hpp"
#include "mmdoppler/units.hpp"

using namespace mmdoppler;

namespace {

const MotionState kMotion = make_motion(kmh_to_mps(500.0), 28e9);

BeamGeometry geom_deg(double theta_v, double theta_rx) {
    return make_geometry(deg_to_rad(theta_rx), deg_to_rad(theta_rx), deg_to_rad(theta_v));
}

void BM_DopplerPdfGrid(benchmark::State& state) {
    const auto g = geom_deg(30.0, 20.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto s = sample_spectrum([&](double f) { return doppler_pdf(f, g, kMotion, PdfMode::Exact, {0.0}); },
                                 kMotion.f_dmax, n, "exact");
        benchmark::DoNotOptimize(s.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DopplerPdfGrid)->Arg(1001)->Arg(100001);

void BM_Normalisation(benchmark::State& state) {
    const auto g = geom_deg(static_cast<double>(state.range(0)), 10.0);
    const auto br = pdf_breakpoints(g, kMotion);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_psd([&](double f) { return doppler_pdf(f, g, kMotion); },
                                               -kMotion.f_dmax, kMotion.f_dmax, kMotion.f_dmax, br));
    }
}
BENCHMARK(BM_Normalisation)->Arg(0)->Arg(90);

void BM_SampleDoppler(benchmark::State& state) {
    const auto g = geom_deg(70.0, 10.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto s = sample_doppler(g, kMotion, GainPattern::flat(), n, 1);
        benchmark::DoNotOptimize(s.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDoppler)->Arg(1 << 16)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_HistogramL1(benchmark::State& state) {
    const auto g = geom_deg(70.0, 10.0);
    const auto h = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 1'000'000, 1), 200);
    const auto br = pdf_breakpoints(g, kMotion);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            l1_distance(h, [&](double f) { return doppler_pdf(f, g, kMotion); }, kMotion.f_dmax, br));
    }
}
BENCHMARK(BM_HistogramL1)->Unit(benchmark::kMillisecond);

void BM_GenerateFading(benchmark::State& state) {
    const auto g = geom_deg(90.0, 10.0);
    const auto paths = static_cast<std::size_t>(state.range(0));
    const double fs = 4.0 * kMotion.f_dmax;
    for (auto _ : state) {
        auto r = generate_fading(g, kMotion, GainPattern::flat(), paths, 0.1, fs, 3);
        benchmark::DoNotOptimize(r.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(0.1 * fs));
}
BENCHMARK(BM_GenerateFading)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_WelchPsd(benchmark::State& state) {
    const auto r = generate_fading(geom_deg(90.0, 10.0), kMotion, GainPattern::flat(), 64, 1.0,
                                   4.0 * kMotion.f_dmax, 3);
    for (auto _ : state) {
        auto est = estimate_psd(r, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(est.values.data());
    }
}
BENCHMARK(BM_WelchPsd)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TrainSimulate(benchmark::State& state) {
    ScenarioConfig c;
    c.carrier = 28e9;
    c.track_length = 20000.0;
    for (int i = 0; i < 8; ++i) {
        c.stations.push_back({1250.0 + 2500.0 * i, 30.0});
    }
    c.speed_profile = {{0.0, kmh_to_mps(50.0)}, {30.0, kmh_to_mps(50.0)}, {280.0, kmh_to_mps(500.0)},
                       {400.0, kmh_to_mps(500.0)}};
    c.spread_mode = state.range(0) == 0 ? SpreadMode::Approx : SpreadMode::Exact;
    for (auto _ : state) {
        auto t = simulate(c);
        benchmark::DoNotOptimize(t.rows.data());
    }
}
BENCHMARK(BM_TrainSimulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
