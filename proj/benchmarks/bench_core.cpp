// Copyright 2026 The gqcr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "gqcr/allocation.hpp"
#include "gqcr/fisher.hpp"
#include "gqcr/homodyne.hpp"
#include "gqcr/models.hpp"
#include "gqcr/oracle.hpp"
#include "gqcr/random.hpp"

using namespace gqcr;

namespace {

void BM_QfiFull(benchmark::State &state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    CounterRng rng(1, m);
    const GaussianState s = random_pure_state(m, rng);
    const RealVector x = RealVector::Ones(static_cast<Eigen::Index>(2 * m));
    const RealMatrix zero = RealMatrix::Zero(x.size(), x.size());
    for (auto _ : state) benchmark::DoNotOptimize(qfi_full(x, s.cov(), zero));
}
BENCHMARK(BM_QfiFull)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

void BM_DetectionBasis(benchmark::State &state) {
    const GridPtr grid = Grid::uniform(-8.0, 8.0, static_cast<std::size_t>(state.range(0)));
    const ComplexField v = hermite_gauss(1, 1.0, 0.0, grid);
    for (auto _ : state) benchmark::DoNotOptimize(build_detection_basis(v, 6));
}
BENCHMARK(BM_DetectionBasis)->Arg(512)->Arg(1024)->Arg(4096);

void BM_Analyze(benchmark::State &state) {
    const GridPtr grid = Grid::uniform(-8.0, 8.0, 1024);
    const DisplacementFamily family(1e6, 1.0, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(analyze(family, grid));
}
BENCHMARK(BM_Analyze);

void BM_SampleMarginal(benchmark::State &state) {
    std::vector<double> out(static_cast<std::size_t>(state.range(0)));
    const QuadratureMarginal marginal{.mean = 1.0, .variance = 2.0};
    CounterRng rng(3, 0);
    for (auto _ : state) {
        sample_marginal(marginal, out, rng);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleMarginal)->Arg(1 << 10)->Arg(1 << 16);

void BM_OverlapGrid(benchmark::State &state) {
    CounterRng rng(5, 0);
    const GaussianState a = random_pure_state(1, rng);
    const GaussianState b = random_pure_state(1, rng);
    const GridPlan plan = plan_overlap_grid(a, b);
    for (auto _ : state) benchmark::DoNotOptimize(overlap_grid(a, b, plan.box, plan.points_per_axis));
}
BENCHMARK(BM_OverlapGrid);

void BM_NetworkAudit(benchmark::State &state) {
    const SqueezerBank bank = SqueezerBank::from_db({6.0, 3.0, 0.0, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(random_network_audit(bank, state.range(0), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetworkAudit)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
