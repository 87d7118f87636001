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

#include "csipm/training.hpp"
#include "csipm/error.hpp"
#include "csipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace csipm
{
    void TrainConfig::validate() const
    {
        if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
            throw InvalidConfig("train.learning_rate must be finite and >= 0");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
            throw InvalidConfig("train.beta1 and train.beta2 must lie in [0, 1)");
        if (!(epsilon > 0.0))
            throw InvalidConfig("train.epsilon must be > 0");
        if (batch_size < 1)
            throw InvalidConfig("train.batch_size must be >= 1");
        if (epochs < 1)
            throw InvalidConfig("train.epochs must be >= 1");
    }

    AdamState AdamState::zeros_like(const ModelParams &params)
    {
        AdamState s;
        s.m = ModelParams::zeros(params.feature_width(), params.hidden(), params.output_width());
        s.v = s.m;
        return s;
    }

    void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state, const TrainConfig &config)
    {
        state.t += 1;
        const double t = static_cast<double>(state.t);
        const double c1 = 1.0 - std::pow(config.beta1, t);
        const double c2 = 1.0 - std::pow(config.beta2, t);

        auto p = tensors(params);
        const auto g = tensors(grads);
        auto m = tensors(state.m);
        auto v = tensors(state.v);
        for (std::size_t ti = 0; ti < num_tensors; ++ti)
        {
            if (g[ti].values.size() != p[ti].values.size() || m[ti].values.size() != p[ti].values.size())
                throw ShapeMismatch("adam_step: shape mismatch in " + std::string(p[ti].name));
            for (std::size_t i = 0; i < p[ti].values.size(); ++i)
            {
                const double gi = g[ti].values[i];
                double &mi = m[ti].values[i];
                double &vi = v[ti].values[i];
                mi = config.beta1 * mi + (1.0 - config.beta1) * gi;
                vi = config.beta2 * vi + (1.0 - config.beta2) * gi * gi;
                const double m_hat = mi / c1;
                const double v_hat = vi / c2;
                p[ti].values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
            }
        }
    }

    double evaluate_mse(std::span<const double> predictions, const WindowSet &windows)
    {
        if (windows.empty())
            throw EmptySplit("cannot evaluate on an empty window set");
        return mse_loss(predictions, windows.targets);
    }

    double evaluate_mse(const ModelParams &params, const WindowSet &windows)
    {
        if (windows.empty())
            throw EmptySplit("cannot evaluate on an empty window set");
        return evaluate_mse(predict_all(params, windows), windows);
    }

    TrainResult train(const WindowSet &train_windows, const WindowSet &test_windows, const ModelConfig &model,
                      const TrainConfig &config, const EpochCallback &on_epoch)
    {
        config.validate();
        if (train_windows.empty())
            throw EmptySplit("training split has no windows");
        if (test_windows.empty())
            throw EmptySplit("test split has no windows");
        if (train_windows.width != test_windows.width || train_windows.target_width != test_windows.target_width)
            throw WidthMismatch("train and test windows have different widths");
        if (train_windows.target_width % 2 != 0)
            throw ShapeMismatch("target width must be even (real and imaginary parts)");

        TrainResult result;
        result.params = init_params(train_windows.width, train_windows.target_width / 2,
                                    config.seed, model.hidden);
        result.adam = AdamState::zeros_like(result.params);
        result.initial_test_mse = evaluate_mse(result.params, test_windows);

        std::vector<std::size_t> order(train_windows.size());
        for (int epoch = 1; epoch <= config.epochs; ++epoch)
        {
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(derive_seed(config.seed, stream::shuffle, static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[uniform_index(rng, i)]);

            double loss_sum = 0.0;
            for (std::size_t start = 0; start < order.size(); start += config.batch_size)
            {
                const std::size_t len = std::min(config.batch_size, order.size() - start);
                const std::span<const std::size_t> batch(order.data() + start, len);
                const BatchGradient bg = backward(result.params, train_windows, batch);
                loss_sum += bg.loss * static_cast<double>(len);
                adam_step(result.params, bg.gradient, result.adam, config);
            }

            EpochStats stats;
            stats.epoch = epoch;
            stats.train_mse = loss_sum / static_cast<double>(order.size());
            stats.test_mse = evaluate_mse(result.params, test_windows);
            result.history.push_back(stats);
            if (on_epoch)
                on_epoch(stats);
        }
        return result;
    }
}
