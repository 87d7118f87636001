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

#ifndef CSIPM_TRAINING_HPP
#define CSIPM_TRAINING_HPP

#include "csipm/lstm.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace csipm
{
    struct TrainConfig
    {
        double learning_rate = 8e-5;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
        std::size_t batch_size = 64;
        int epochs = 200;
        std::uint64_t seed = 0;

        void validate() const;
    };

    struct AdamState
    {
        ModelParams m;
        ModelParams v;
        std::uint64_t t = 0;

        static AdamState zeros_like(const ModelParams &params);
        bool operator==(const AdamState &) const = default;
    };

    // One bias-corrected Adam update of params in place.
    void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state, const TrainConfig &config);

    struct EpochStats
    {
        int epoch = 0;
        double train_mse = 0.0; // mean per-window loss seen during the epoch's updates
        double test_mse = 0.0;  // after the epoch
    };

    struct TrainResult
    {
        ModelParams params;
        AdamState adam;
        std::vector<EpochStats> history;
        double initial_test_mse = 0.0;
    };

    using EpochCallback = std::function<void(const EpochStats &)>;

    // Initializes from derive_seed(seed, init) and shuffles each epoch with
    // derive_seed(seed, shuffle, epoch). The last partial batch is trained.
    TrainResult train(const WindowSet &train_windows, const WindowSet &test_windows, const ModelConfig &model,
                      const TrainConfig &config, const EpochCallback &on_epoch = {});

    // Mean over windows and outputs of the squared error, on raw-scale labels.
    double evaluate_mse(const ModelParams &params, const WindowSet &windows);
    double evaluate_mse(std::span<const double> predictions, const WindowSet &windows);
}

#endif
