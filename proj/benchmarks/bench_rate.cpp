// SPDX-License-Identifier: Apache-2.0
//
// fdpc-lab: dirty paper coding rates over fading channels with imperfect CSIT
// Copyright (C) 2026 The fdpc-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "fdpc/lab.hpp"

namespace {

using namespace fdpc;

ExperimentConfig config(const char* name, std::size_t n_inner) {
    ExperimentConfig c = reference_config(name);
    c.mc.n_inner = n_inner;
    c.mc.n_outer = 1;
    return c;
}

void BM_ObjectiveFixedW(benchmark::State& state) {
    const ExperimentConfig c = config("fdpc-3x2-a", static_cast<std::size_t>(state.range(0)));
    const ChannelSpec spec = c.channel();
    const SampleBank bank = make_bank(c, spec, CsitModel::none(), c.mc.seed);
    const Mat W = make_policy(SolverKind::Pinv, spec).fixed_w().w;
    for (auto _ : state) benchmark::DoNotOptimize(objective(spec, W, bank.cells()[0].draws));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ObjectiveFixedW)->Arg(1000)->Arg(20000);

void BM_LogdetDirectVsSchur(benchmark::State& state) {
    const ExperimentConfig c = config("fdpc-3x2-a", 1);
    const ChannelSpec spec = c.channel();
    const SampleBank bank = make_bank(c, spec, CsitModel::none(), c.mc.seed);
    const Mat& H = bank.cells()[0].draws[0];
    const Mat W = make_policy(SolverKind::Pinv, spec).fixed_w().w;
    const BlockMatrix blocks(spec, W);
    const bool schur = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(schur ? logdet_M_schur(spec, W, H) : logdet_M(spec, blocks, H));
}
BENCHMARK(BM_LogdetDirectVsSchur)->Arg(0)->Arg(1);

void BM_BuildBank(benchmark::State& state) {
    ExperimentConfig c = config("fdpc-2x2-a", 1000);
    c.mc.n_outer = 20;
    const ChannelSpec spec = c.channel();
    for (auto _ : state) benchmark::DoNotOptimize(make_bank(c, spec, c.csit_model(), c.mc.seed));
}
BENCHMARK(BM_BuildBank);

}  // namespace

BENCHMARK_MAIN();
