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

#ifndef CSIPM_SERIAL_HPP
#define CSIPM_SERIAL_HPP

#include "csipm/channel.hpp"
#include "csipm/dataset.hpp"
#include "csipm/lstm.hpp"

// Single-threaded versions of the parallel kernels. They share the per-item
// code with the parallel paths and differ only in the loop, so tests can
// compare results bit for bit and the benchmark can time the speedup.
namespace csipm::serial
{
    ChannelMatrix channel_matrix(std::span<const PathComponent> paths,
                                 const ArrayGeometry &geometry, const ChannelConfig &config);

    Streams collect_streams(std::span<const Trace> traces, const SimulationSetup &setup, int ref_subcarrier);

    BatchGradient backward(const ModelParams &params, const WindowSet &windows, std::span<const std::size_t> batch);

    std::vector<double> predict_all(const ModelParams &params, const WindowSet &windows);
}

#endif
