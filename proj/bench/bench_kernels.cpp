// SPDX-License-Identifier: Apache-2.0
//
// csipm - self-trained CSI prediction for mmWave vehicular users
// Copyright (C) 2026 The csipm authors
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

#include "csipm/channel.hpp"
#include "csipm/dataset.hpp"
#include "csipm/lstm.hpp"
#include "csipm/rng.hpp"
#include "csipm/serial.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace
{
    using namespace csipm;

    std::vector<PathComponent> sample_paths()
    {
        const Scene scene;
        return trace_paths(scene, scene.grid_point(scene.gnb_row() + 120, 90), ChannelConfig{});
    }

    std::vector<Trace> sample_traces(std::size_t n)
    {
        const SimulationSetup setup;
        DatasetConfig dc;
        std::vector<Trace> traces;
        for (std::uint64_t id = 0; id < n; ++id)
            traces.push_back(vehicle_trace(setup, dc, 7, id));
        return traces;
    }

    // Synthetic windows of the CSI1+CSI2+Pos width with M = 16.
    WindowSet sample_windows(std::size_t n)
    {
        WindowSet ws;
        ws.features = FeatureSet(FeatureSet::pos | FeatureSet::csi1 | FeatureSet::csi2);
        ws.window = 10;
        ws.width = ws.features.width(16);
        ws.target_width = 32;
        Rng rng(3);
        ws.rows.resize((n + 9) * ws.width);
        for (double &v : ws.rows)
            v = uniform_real(rng, -1.0, 1.0);
        ws.targets.resize(n * 32);
        for (double &v : ws.targets)
            v = uniform_real(rng, -1e-4, 1e-4);
        for (std::size_t i = 0; i < n; ++i)
        {
            ws.starts.push_back(i);
            ws.info.push_back({0, 0.1 * static_cast<double>(i)});
        }
        return ws;
    }

    void BM_ChannelMatrixSerial(benchmark::State &state)
    {
        const auto paths = sample_paths();
        for (auto _ : state)
            benchmark::DoNotOptimize(serial::channel_matrix(paths, ArrayGeometry{}, ChannelConfig{}));
    }

    void BM_ChannelMatrixParallel(benchmark::State &state)
    {
        const auto paths = sample_paths();
        for (auto _ : state)
            benchmark::DoNotOptimize(channel_matrix(paths, ArrayGeometry{}, ChannelConfig{}));
    }

    void BM_CollectStreamsSerial(benchmark::State &state)
    {
        const auto traces = sample_traces(16);
        const SimulationSetup setup;
        for (auto _ : state)
            benchmark::DoNotOptimize(serial::collect_streams(traces, setup, 0));
    }

    void BM_CollectStreamsParallel(benchmark::State &state)
    {
        const auto traces = sample_traces(16);
        const SimulationSetup setup;
        for (auto _ : state)
            benchmark::DoNotOptimize(collect_streams(traces, setup, 0));
    }

    void BM_BackwardSerial(benchmark::State &state)
    {
        const WindowSet ws = sample_windows(64);
        const ModelParams params = init_params(ws.width, 16, 1);
        std::vector<std::size_t> batch(64);
        std::iota(batch.begin(), batch.end(), std::size_t{0});
        for (auto _ : state)
            benchmark::DoNotOptimize(serial::backward(params, ws, batch));
    }

    void BM_BackwardParallel(benchmark::State &state)
    {
        const WindowSet ws = sample_windows(64);
        const ModelParams params = init_params(ws.width, 16, 1);
        std::vector<std::size_t> batch(64);
        std::iota(batch.begin(), batch.end(), std::size_t{0});
        for (auto _ : state)
            benchmark::DoNotOptimize(backward(params, ws, batch));
    }

    void BM_PredictAllSerial(benchmark::State &state)
    {
        const WindowSet ws = sample_windows(2048);
        const ModelParams params = init_params(ws.width, 16, 1);
        for (auto _ : state)
            benchmark::DoNotOptimize(serial::predict_all(params, ws));
    }

    void BM_PredictAllParallel(benchmark::State &state)
    {
        const WindowSet ws = sample_windows(2048);
        const ModelParams params = init_params(ws.width, 16, 1);
        for (auto _ : state)
            benchmark::DoNotOptimize(predict_all(params, ws));
    }
}

BENCHMARK(BM_ChannelMatrixSerial)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ChannelMatrixParallel)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_CollectStreamsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CollectStreamsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BackwardSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BackwardParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAllSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAllParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
