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

#include "csipm/serial.hpp"
#include "csipm/error.hpp"

namespace csipm::serial
{
    ChannelMatrix channel_matrix(std::span<const PathComponent> paths,
                                 const ArrayGeometry &geometry, const ChannelConfig &config)
    {
        ChannelMatrix H(geometry.size(), config.num_subcarriers);
        for (int k = 0; k < config.num_subcarriers; ++k)
        {
            const ChannelVector h = channel_at_subcarrier(paths, k, geometry, config);
            std::copy(h.begin(), h.end(), H.column(k).begin());
        }
        return H;
    }

    Streams collect_streams(std::span<const Trace> traces, const SimulationSetup &setup, int ref_subcarrier)
    {
        if (ref_subcarrier < 0 || ref_subcarrier >= setup.channel.num_subcarriers)
            throw SubcarrierOutOfRange("reference subcarrier " + std::to_string(ref_subcarrier) + " out of range");
        Streams out;
        for (const Trace &trace : traces)
            detail::collect_trace(trace, setup, ref_subcarrier, out.cam, out.csi);
        return out;
    }

    BatchGradient backward(const ModelParams &params, const WindowSet &windows, std::span<const std::size_t> batch)
    {
        if (batch.empty())
            throw ShapeMismatch("backward: empty batch");
        BatchGradient out{ModelParams::zeros(params.feature_width(), params.hidden(), params.output_width()), 0.0};
        const ModelParams zero = out.gradient;
        detail::Workspace ws;
        // Same summation order as the parallel path: each sample's gradient is
        // formed on its own, then samples are added in batch order.
        std::vector<ModelParams> per_sample(batch.size(), zero);
        for (std::size_t b = 0; b < batch.size(); ++b)
            out.loss += detail::accumulate_sample_gradient(params, windows[batch[b]], 1.0, per_sample[b], ws);

        detail::reduce_mean(per_sample, out.gradient, false);
        out.loss /= static_cast<double>(batch.size());
        return out;
    }

    std::vector<double> predict_all(const ModelParams &params, const WindowSet &windows)
    {
        std::vector<double> out;
        out.reserve(windows.size() * static_cast<std::size_t>(params.output_width()));
        for (std::size_t i = 0; i < windows.size(); ++i)
        {
            const auto y = model_forward(params, windows[i]);
            out.insert(out.end(), y.begin(), y.end());
        }
        return out;
    }
}
