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

#include "csipm/lstm.hpp"
#include "csipm/error.hpp"
#include "csipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csipm
{
    LstmLayerParams LstmLayerParams::zeros(int hidden, int input)
    {
        LstmLayerParams p;
        p.hidden = hidden;
        p.input = input;
        p.input_weights.assign(static_cast<std::size_t>(4 * hidden) * input, 0.0);
        p.recurrent_weights.assign(static_cast<std::size_t>(4 * hidden) * hidden, 0.0);
        p.biases.assign(static_cast<std::size_t>(4 * hidden), 0.0);
        return p;
    }

    ModelParams ModelParams::zeros(int feature_width, int hidden, int output_width)
    {
        if (feature_width < 1 || hidden < 1 || output_width < 1)
            throw InvalidConfig("model widths must be >= 1");
        ModelParams p;
        p.layer1 = LstmLayerParams::zeros(hidden, feature_width);
        p.layer2 = LstmLayerParams::zeros(hidden, hidden);
        p.fc_weights.assign(static_cast<std::size_t>(output_width) * hidden, 0.0);
        p.fc_bias.assign(static_cast<std::size_t>(output_width), 0.0);
        return p;
    }

    std::size_t ModelParams::num_values() const
    {
        std::size_t n = 0;
        for (const auto &t : tensors(*this))
            n += t.values.size();
        return n;
    }

    namespace
    {
        template <typename Params>
        auto make_tensors(Params &p)
        {
            using Ref = std::conditional_t<std::is_const_v<Params>, ConstTensorRef, TensorRef>;
            const int h4 = 4 * p.layer1.hidden;
            return std::array<Ref, num_tensors>{
                Ref{"layer1.input_weights", h4, p.layer1.input, p.layer1.input_weights},
                Ref{"layer1.recurrent_weights", h4, p.layer1.hidden, p.layer1.recurrent_weights},
                Ref{"layer1.biases", 1, h4, p.layer1.biases},
                Ref{"layer2.input_weights", 4 * p.layer2.hidden, p.layer2.input, p.layer2.input_weights},
                Ref{"layer2.recurrent_weights", 4 * p.layer2.hidden, p.layer2.hidden, p.layer2.recurrent_weights},
                Ref{"layer2.biases", 1, 4 * p.layer2.hidden, p.layer2.biases},
                Ref{"fc_weights", static_cast<int>(p.fc_bias.size()), p.layer2.hidden, p.fc_weights},
                Ref{"fc_bias", 1, static_cast<int>(p.fc_bias.size()), p.fc_bias},
            };
        }
    }

    std::array<TensorRef, num_tensors> tensors(ModelParams &params) { return make_tensors(params); }
    std::array<ConstTensorRef, num_tensors> tensors(const ModelParams &params) { return make_tensors(params); }

    ModelParams init_params(int feature_width, int num_antennas, std::uint64_t seed, int hidden)
    {
        ModelParams p = ModelParams::zeros(feature_width, hidden, 2 * num_antennas);
        Rng rng(derive_seed(seed, stream::init));
        auto fill = [&rng](std::vector<double> &w, int fan_in)
        {
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            for (double &x : w)
                x = uniform_real(rng, -bound, bound);
        };
        fill(p.layer1.input_weights, p.layer1.input);
        fill(p.layer1.recurrent_weights, hidden);
        fill(p.layer2.input_weights, p.layer2.input);
        fill(p.layer2.recurrent_weights, hidden);
        fill(p.fc_weights, hidden);
        for (LstmLayerParams *layer : {&p.layer1, &p.layer2})
            std::fill(layer->biases.begin() + hidden, layer->biases.begin() + 2 * hidden, 1.0);
        return p;
    }

    namespace
    {
        inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

        // Forward over a whole sequence, caching post-activation gates, cell
        // states, tanh(cell) and hidden states per timestep.
        void layer_forward(const LstmLayerParams &p, const double *x, int length,
                           std::vector<double> &gates, std::vector<double> &cell,
                           std::vector<double> &tanh_cell, std::vector<double> &hidden)
        {
            const int H = p.hidden;
            const int D = p.input;
            gates.resize(static_cast<std::size_t>(length) * 4 * H);
            cell.resize(static_cast<std::size_t>(length) * H);
            tanh_cell.resize(cell.size());
            hidden.resize(cell.size());

            for (int t = 0; t < length; ++t)
            {
                const double *xt = x + static_cast<std::size_t>(t) * D;
                const double *h_prev = t > 0 ? hidden.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
                const double *c_prev = t > 0 ? cell.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
                double *z = gates.data() + static_cast<std::size_t>(t) * 4 * H;

                for (int r = 0; r < 4 * H; ++r)
                {
                    double acc = p.biases[r];
                    const double *wr = p.input_weights.data() + static_cast<std::size_t>(r) * D;
                    for (int d = 0; d < D; ++d)
                        acc += wr[d] * xt[d];
                    if (h_prev)
                    {
                        const double *ur = p.recurrent_weights.data() + static_cast<std::size_t>(r) * H;
                        for (int j = 0; j < H; ++j)
                            acc += ur[j] * h_prev[j];
                    }
                    z[r] = acc;
                }

                double *ct = cell.data() + static_cast<std::size_t>(t) * H;
                double *tct = tanh_cell.data() + static_cast<std::size_t>(t) * H;
                double *ht = hidden.data() + static_cast<std::size_t>(t) * H;
                for (int j = 0; j < H; ++j)
                {
                    const double i = sigmoid(z[j]);
                    const double f = sigmoid(z[H + j]);
                    const double g = std::tanh(z[2 * H + j]);
                    const double o = sigmoid(z[3 * H + j]);
                    z[j] = i;
                    z[H + j] = f;
                    z[2 * H + j] = g;
                    z[3 * H + j] = o;
                    ct[j] = f * (c_prev ? c_prev[j] : 0.0) + i * g;
                    tct[j] = std::tanh(ct[j]);
                    ht[j] = o * tct[j];
                }
            }
        }

        // BPTT through one layer. dh_ext holds the loss gradient arriving at each
        // hidden state from above; dx (optional) receives the gradient wrt inputs.
        void layer_backward(const LstmLayerParams &p, const double *x, int length,
                            const std::vector<double> &gates, const std::vector<double> &cell,
                            const std::vector<double> &tanh_cell, const std::vector<double> &hidden,
                            const double *dh_ext, double weight, LstmLayerParams &grad, double *dx,
                            detail::Workspace &ws)
        {
            const int H = p.hidden;
            const int D = p.input;
            ws.dz.assign(static_cast<std::size_t>(4 * H), 0.0);
            ws.dh_next.assign(static_cast<std::size_t>(H), 0.0);
            ws.dc_next.assign(static_cast<std::size_t>(H), 0.0);
            double *dz = ws.dz.data();

            for (int t = length - 1; t >= 0; --t)
            {
                const double *g4 = gates.data() + static_cast<std::size_t>(t) * 4 * H;
                const double *tct = tanh_cell.data() + static_cast<std::size_t>(t) * H;
                const double *c_prev = t > 0 ? cell.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
                const double *h_prev = t > 0 ? hidden.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
                const double *xt = x + static_cast<std::size_t>(t) * D;

                for (int j = 0; j < H; ++j)
                {
                    const double i = g4[j], f = g4[H + j], g = g4[2 * H + j], o = g4[3 * H + j];
                    const double dh = dh_ext[static_cast<std::size_t>(t) * H + j] + ws.dh_next[j];
                    const double d_o = dh * tct[j];
                    const double dc = dh * o * (1.0 - tct[j] * tct[j]) + ws.dc_next[j];
                    const double cp = c_prev ? c_prev[j] : 0.0;
                    dz[j] = dc * g * i * (1.0 - i);
                    dz[H + j] = dc * cp * f * (1.0 - f);
                    dz[2 * H + j] = dc * i * (1.0 - g * g);
                    dz[3 * H + j] = d_o * o * (1.0 - o);
                    ws.dc_next[j] = dc * f;
                }

                for (int r = 0; r < 4 * H; ++r)
                {
                    const double wdz = weight * dz[r];
                    grad.biases[r] += wdz;
                    double *gw = grad.input_weights.data() + static_cast<std::size_t>(r) * D;
                    for (int d = 0; d < D; ++d)
                        gw[d] += wdz * xt[d];
                    if (h_prev)
                    {
                        double *gu = grad.recurrent_weights.data() + static_cast<std::size_t>(r) * H;
                        for (int k = 0; k < H; ++k)
                            gu[k] += wdz * h_prev[k];
                    }
                }

                if (dx)
                {
                    double *dxt = dx + static_cast<std::size_t>(t) * D;
                    std::fill(dxt, dxt + D, 0.0);
                    for (int r = 0; r < 4 * H; ++r)
                    {
                        const double *wr = p.input_weights.data() + static_cast<std::size_t>(r) * D;
                        for (int d = 0; d < D; ++d)
                            dxt[d] += wr[d] * dz[r];
                    }
                }
                std::fill(ws.dh_next.begin(), ws.dh_next.end(), 0.0);
                for (int r = 0; r < 4 * H; ++r)
                {
                    const double *ur = p.recurrent_weights.data() + static_cast<std::size_t>(r) * H;
                    for (int k = 0; k < H; ++k)
                        ws.dh_next[k] += ur[k] * dz[r];
                }
            }
        }
    }

    LayerOutput lstm_forward(const LstmLayerParams &layer, std::span<const double> sequence, int length)
    {
        if (length < 1)
            throw ShapeMismatch("LSTM input sequence must be non-empty");
        if (sequence.size() != static_cast<std::size_t>(length) * layer.input)
            throw WidthMismatch("LSTM input has " + std::to_string(sequence.size()) + " values, expected " +
                                std::to_string(length) + " x " + std::to_string(layer.input));
        std::vector<double> gates, cell, tanh_cell;
        LayerOutput out;
        layer_forward(layer, sequence.data(), length, gates, cell, tanh_cell, out.hidden_sequence);
        const std::size_t H = static_cast<std::size_t>(layer.hidden);
        out.final_cell.assign(cell.end() - static_cast<std::ptrdiff_t>(H), cell.end());
        out.final_hidden.assign(out.hidden_sequence.end() - static_cast<std::ptrdiff_t>(H), out.hidden_sequence.end());
        return out;
    }

    namespace detail
    {
        void reduce_mean(const std::vector<ModelParams> &per_sample, ModelParams &mean, bool parallel)
        {
            const double inv = 1.0 / static_cast<double>(per_sample.size());
            auto dst = tensors(mean);
            std::vector<std::array<ConstTensorRef, num_tensors>> src;
            src.reserve(per_sample.size());
            for (const ModelParams &g : per_sample)
                src.push_back(tensors(g));
            for (std::size_t ti = 0; ti < num_tensors; ++ti)
            {
                const auto len = static_cast<std::ptrdiff_t>(dst[ti].values.size());
#pragma omp parallel for schedule(static) if (parallel)
                for (std::ptrdiff_t i = 0; i < len; ++i)
                {
                    double acc = 0.0;
                    for (const auto &g : src)
                        acc += g[ti].values[i];
                    dst[ti].values[i] = acc * inv;
                }
            }
        }

        void check_window(const ModelParams &params, const WindowView &window)
        {
            if (window.width != params.feature_width())
                throw WidthMismatch("window feature width " + std::to_string(window.width) +
                                    " != model input width " + std::to_string(params.feature_width()));
            if (window.length < 1 || window.steps.size() != static_cast<std::size_t>(window.length) * window.width)
                throw ShapeMismatch("window is empty or inconsistent");
        }

        void forward_cached(const ModelParams &params, const WindowView &window, Workspace &ws)
        {
            const int T = window.length;
            const int H = params.hidden();
            layer_forward(params.layer1, window.steps.data(), T, ws.gates1, ws.cell1, ws.tanh1, ws.hidden1);
            layer_forward(params.layer2, ws.hidden1.data(), T, ws.gates2, ws.cell2, ws.tanh2, ws.hidden2);

            const int O = params.output_width();
            const double *h_last = ws.hidden2.data() + static_cast<std::size_t>(T - 1) * H;
            ws.output.resize(static_cast<std::size_t>(O));
            for (int o = 0; o < O; ++o)
            {
                double acc = params.fc_bias[o];
                const double *w = params.fc_weights.data() + static_cast<std::size_t>(o) * H;
                for (int j = 0; j < H; ++j)
                    acc += w[j] * h_last[j];
                ws.output[o] = acc;
            }
        }

        double accumulate_sample_gradient(const ModelParams &params, const WindowView &window, double weight,
                                          ModelParams &grad, Workspace &ws)
        {
            check_window(params, window);
            if (window.target.size() != static_cast<std::size_t>(params.output_width()))
                throw ShapeMismatch("target width does not match model output width");
            forward_cached(params, window, ws);

            const int T = window.length;
            const int H = params.hidden();
            const int O = params.output_width();

            // d(mean over O of squared error)/d(output)
            std::vector<double> dy(static_cast<std::size_t>(O));
            double loss = 0.0;
            for (int o = 0; o < O; ++o)
            {
                const double r = ws.output[o] - window.target[o];
                loss += r * r;
                dy[o] = 2.0 * r / O;
            }
            loss /= O;

            const double *h_last = ws.hidden2.data() + static_cast<std::size_t>(T - 1) * H;
            ws.dh_ext2.assign(static_cast<std::size_t>(T) * H, 0.0);
            double *dh_last = ws.dh_ext2.data() + static_cast<std::size_t>(T - 1) * H;
            for (int o = 0; o < O; ++o)
            {
                const double wdy = weight * dy[o];
                grad.fc_bias[o] += wdy;
                double *gw = grad.fc_weights.data() + static_cast<std::size_t>(o) * H;
                const double *w = params.fc_weights.data() + static_cast<std::size_t>(o) * H;
                for (int j = 0; j < H; ++j)
                {
                    gw[j] += wdy * h_last[j];
                    dh_last[j] += w[j] * dy[o];
                }
            }

            ws.dx2.assign(static_cast<std::size_t>(T) * H, 0.0);
            layer_backward(params.layer2, ws.hidden1.data(), T, ws.gates2, ws.cell2, ws.tanh2, ws.hidden2,
                           ws.dh_ext2.data(), weight, grad.layer2, ws.dx2.data(), ws);
            layer_backward(params.layer1, window.steps.data(), T, ws.gates1, ws.cell1, ws.tanh1, ws.hidden1,
                           ws.dx2.data(), weight, grad.layer1, nullptr, ws);
            return loss;
        }
    }

    std::vector<double> model_forward(const ModelParams &params, const WindowView &window)
    {
        detail::check_window(params, window);
        detail::Workspace ws;
        detail::forward_cached(params, window, ws);
        return ws.output;
    }

    double mse_loss(std::span<const double> predictions, std::span<const double> targets)
    {
        if (predictions.size() != targets.size())
            throw ShapeMismatch("mse_loss: " + std::to_string(predictions.size()) + " predictions vs " +
                                std::to_string(targets.size()) + " targets");
        if (predictions.empty())
            throw ShapeMismatch("mse_loss: empty input");
        double acc = 0.0;
        for (std::size_t i = 0; i < predictions.size(); ++i)
        {
            const double r = predictions[i] - targets[i];
            acc += r * r;
        }
        return acc / static_cast<double>(predictions.size());
    }

    BatchGradient backward(const ModelParams &params, const WindowSet &windows, std::span<const std::size_t> batch)
    {
        if (batch.empty())
            throw ShapeMismatch("backward: empty batch");
        // Every window of a set shares its shape, so one check covers the batch
        // and nothing can throw inside the parallel region.
        for (std::size_t i : batch)
            if (i >= windows.size())
                throw ShapeMismatch("backward: batch index " + std::to_string(i) + " out of range");
        detail::check_window(params, windows[batch[0]]);
        if (windows.target_width != params.output_width())
            throw ShapeMismatch("target width does not match model output width");

        const auto n = static_cast<std::ptrdiff_t>(batch.size());
        const ModelParams zero = ModelParams::zeros(params.feature_width(), params.hidden(), params.output_width());
        std::vector<ModelParams> per_sample(batch.size(), zero);
        std::vector<double> losses(batch.size());

#pragma omp parallel
        {
            detail::Workspace ws;
#pragma omp for schedule(static)
            for (std::ptrdiff_t b = 0; b < n; ++b)
                losses[b] = detail::accumulate_sample_gradient(params, windows[batch[b]], 1.0, per_sample[b], ws);
        }

        BatchGradient out{zero, 0.0};
        detail::reduce_mean(per_sample, out.gradient);
        for (double l : losses)
            out.loss += l;
        out.loss /= static_cast<double>(batch.size());
        return out;
    }

    std::vector<double> predict_all(const ModelParams &params, const WindowSet &windows)
    {
        const std::size_t O = static_cast<std::size_t>(params.output_width());
        std::vector<double> out(windows.size() * O);
        const auto n = static_cast<std::ptrdiff_t>(windows.size());
        if (n > 0)
            detail::check_window(params, windows[0]);
#pragma omp parallel
        {
            detail::Workspace ws;
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < n; ++i)
            {
                detail::forward_cached(params, windows[static_cast<std::size_t>(i)], ws);
                std::copy(ws.output.begin(), ws.output.end(), out.begin() + i * static_cast<std::ptrdiff_t>(O));
            }
        }
        return out;
    }
}
