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

#include "fdpc/covopt.hpp"
#include "fdpc/lab.hpp"

namespace {

using namespace fdpc;

struct Instance {
    ChannelSpec spec;
    SampleBank bank;
};

Instance instance(const char* name, std::size_t n_inner) {
    ExperimentConfig c = reference_config(name);
    c.mc.n_inner = n_inner;
    c.mc.n_outer = 1;
    ChannelSpec spec = c.channel();
    SampleBank bank = make_bank(c, spec, CsitModel::none(), c.mc.seed);
    return {std::move(spec), std::move(bank)};
}

void solve(benchmark::State& state, const char* name, SolverKind kind) {
    const Instance in = instance(name, static_cast<std::size_t>(state.range(0)));
    const InnerSamples& draws = in.bank.cells()[0].draws;
    const SolverConfig sc;
    const InflationFactor W0 = initial_guess(in.spec, draws, sc);
    for (auto _ : state) {
        if (kind == SolverKind::Alg1)
            benchmark::DoNotOptimize(alg1_solve(in.spec, W0, sc, draws));
        else
            benchmark::DoNotOptimize(alg2_solve(in.spec, W0, sc, draws));
    }
}

void BM_RankOneClosedForm(benchmark::State& state) {
    const Instance in = instance("fdpc-fig4-1", static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rank_one_closed_form(in.spec, in.bank.cells()[0].draws));
}
BENCHMARK(BM_RankOneClosedForm)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_CAPTURE(solve, alg1_2x2, "fdpc-fig4-1", SolverKind::Alg1)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(solve, alg2_2x2, "fdpc-fig4-1", SolverKind::Alg2)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(solve, alg1_3x2, "fdpc-fig4-2", SolverKind::Alg1)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(solve, alg2_3x2, "fdpc-fig4-2", SolverKind::Alg2)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_JointOptimize(benchmark::State& state) {
    const Instance in = instance("fdpc-3x3-corr", 500);
    JointConfig jc;
    jc.outer_iters = 5;
    for (auto _ : state) benchmark::DoNotOptimize(joint_optimize(in.spec, jc, in.bank));
}
BENCHMARK(BM_JointOptimize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
