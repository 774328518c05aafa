// Copyright 2026 The spinrelax Project Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#include <benchmark/benchmark.h>

#include <spinrelax/io_formats.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/ratemodel.hpp>
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/toygen.hpp>

using namespace spinrelax;

namespace {
ToyVariant variant_of(std::int64_t v) {
    return v == 0 ? ToyVariant::monolayer : v == 1 ? ToyVariant::aa_prime : ToyVariant::abc;
}

const ToyCase& cached_case() {
    static const ToyCase c = generate_case(ToyVariant::abc, 6);
    return c;
}
} // namespace

/// Force set, modes and ZFS samples for one variant and size.
static void BM_GenerateCase(benchmark::State& state) {
    const ToyVariant v = variant_of(state.range(0));
    const int n = static_cast<int>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_case(v, n));
}
BENCHMARK(BM_GenerateCase)
    ->Args({0, 6})
    ->Args({0, 9})
    ->Args({2, 6})
    ->Unit(benchmark::kMillisecond);

/// Hessian assembly, sum rule and diagonalization from a force set.
static void BM_ModesFromForceset(benchmark::State& state) {
    const DisplacementForceSet& d = cached_case().forceset;
    for (auto _ : state)
        benchmark::DoNotOptimize(modes_from_forceset(d));
    state.SetLabel(std::to_string(d.reference.size()) + " atoms");
}
BENCHMARK(BM_ModesFromForceset)->Unit(benchmark::kMillisecond);

/// Spectral function and a 40-point rate curve at a given sigma.
static void BM_RateCurve(benchmark::State& state) {
    const double sigma = static_cast<double>(state.range(0)) / 10.;
    const ToyCase& c = cached_case();
    const CouplingSet cs = build_couplings(extract_derivatives(c.samples, c.modes));
    const auto T = TemperatureGridSpec{}.values();
    for (auto _ : state)
        benchmark::DoNotOptimize(rate_curve(cs, Channel::double_quantum, sigma, T));
}
BENCHMARK(BM_RateCurve)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

/// Multi-start effective-mode fit with one and two modes.
static void BM_EffectiveModeFit(benchmark::State& state) {
    EffectiveModeModel truth;
    truth.modes = {{1e4, 8.}, {1e6, 35.}};
    const auto T = spaced_points(10., 400., 40, true);
    std::vector<double> g;
    for (double t : T)
        g.push_back(eval_model(truth, t));
    FitOptions o;
    o.n_modes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_effective_modes(T, g, o));
}
BENCHMARK(BM_EffectiveModeFit)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

/// Serialization of the largest input file.
static void BM_ForcesetRoundTrip(benchmark::State& state) {
    const ToyCase& c = cached_case();
    for (auto _ : state) {
        const std::string text = format_forceset(c.forceset, c.defect.vacancy);
        benchmark::DoNotOptimize(parse_forceset(text));
    }
}
BENCHMARK(BM_ForcesetRoundTrip)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
