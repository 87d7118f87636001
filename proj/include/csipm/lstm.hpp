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

#ifndef CSIPM_LSTM_HPP
#define CSIPM_LSTM_HPP

#include "csipm/windows.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace csipm
{
    // Gate blocks are stacked in the order (input, forget, cell candidate, output);
    // weight matrices are row-major with 4H rows.
    struct LstmLayerParams
    {
        int hidden = 0;
        int input = 0;
        std::vector<double> input_weights;     // 4H x D
        std::vector<double> recurrent_weights; // 4H x H
        std::vector<double> biases;            // 4H

        static LstmLayerParams zeros(int hidden, int input);
        bool operator==(const LstmLayerParams &) const = default;
    };

    // Two stacked LSTM layers and a fully connected head on the last hidden state.
    struct ModelParams
    {
        LstmLayerParams layer1;
        LstmLayerParams layer2;
        std::vector<double> fc_weights; // O x H
        std::vector<double> fc_bias;    // O

        int feature_width() const { return layer1.input; }
        int hidden() const { return layer1.hidden; }
        int output_width() const { return static_cast<int>(fc_bias.size()); }
        std::size_t num_values() const;

        static ModelParams zeros(int feature_width, int hidden, int output_width);
        bool operator==(const ModelParams &) const = default;
    };

    struct ModelConfig
    {
        int hidden = 10;
    };

    template <typename T>
    struct BasicTensorRef
    {
        std::string_view name;
        int rows;
        int cols;
        std::span<T> values;
    };
    using TensorRef = BasicTensorRef<double>;
    using ConstTensorRef = BasicTensorRef<const double>;

    inline constexpr std::size_t num_tensors = 8;
    // Named views over every parameter tensor, in checkpoint order.
    std::array<TensorRef, num_tensors> tensors(ModelParams &params);
    std::array<ConstTensorRef, num_tensors> tensors(const ModelParams &params);

    // Uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)]; forget-gate biases 1, other biases 0.
    ModelParams init_params(int feature_width, int num_antennas, std::uint64_t seed, int hidden = 10);

    struct LayerOutput
    {
        std::vector<double> hidden_sequence; // length x H
        std::vector<double> final_cell;
        std::vector<double> final_hidden;
    };

    // Runs one layer from h = c = 0 over a length x D row-major sequence.
    LayerOutput lstm_forward(const LstmLayerParams &layer, std::span<const double> sequence, int length);

    std::vector<double> model_forward(const ModelParams &params, const WindowView &window);

    // Mean over batch and outputs of the squared difference.
    double mse_loss(std::span<const double> predictions, std::span<const double> targets);

    struct BatchGradient
    {
        ModelParams gradient;
        double loss = 0.0; // mse_loss over the batch
    };

    // Exact gradient of the batch MSE: the mean of per-sample BPTT gradients.
    // Samples run in parallel; the reduction order is fixed by sample position,
    // so the result does not depend on the thread count.
    BatchGradient backward(const ModelParams &params, const WindowSet &windows, std::span<const std::size_t> batch);

    // Predictions for every window, O values per window.
    std::vector<double> predict_all(const ModelParams &params, const WindowSet &windows);

    namespace detail
    {
        // Per-sample forward caches reused across calls.
        struct Workspace
        {
            std::vector<double> gates1, cell1, tanh1, hidden1;
            std::vector<double> gates2, cell2, tanh2, hidden2;
            std::vector<double> dh_ext2, dx2, dz, dh_next, dc_next, output;
        };

        void forward_cached(const ModelParams &params, const WindowView &window, Workspace &ws);
        // Adds weight * d(sample loss)/d(params) into grad and returns the sample loss.
        double accumulate_sample_gradient(const ModelParams &params, const WindowView &window, double weight,
                                          ModelParams &grad, Workspace &ws);
        void check_window(const ModelParams &params, const WindowView &window);
        // mean = elementwise average of per_sample, summed in sample order.
        void reduce_mean(const std::vector<ModelParams> &per_sample, ModelParams &mean, bool parallel = true);
    }
}

#endif
