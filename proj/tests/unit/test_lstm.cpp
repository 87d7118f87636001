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

#include <catch_amalgamated.hpp>

#include "csipm/error.hpp"
#include "csipm/lstm.hpp"
#include "csipm/serial.hpp"
#include "oracles/lstm_oracle.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

using namespace csipm;

namespace
{
    double batch_loss(const ModelParams &p, const WindowSet &ws, const std::vector<std::size_t> &batch)
    {
        double total = 0.0;
        for (std::size_t i : batch)
        {
            const auto y = model_forward(p, ws[i]);
            total += mse_loss(y, ws[i].target);
        }
        return total / static_cast<double>(batch.size());
    }

    std::vector<std::size_t> iota_batch(std::size_t n)
    {
        std::vector<std::size_t> b(n);
        std::iota(b.begin(), b.end(), 0);
        return b;
    }

    std::vector<double> flat(const ModelParams &p)
    {
        std::vector<double> out;
        for (const auto &t : tensors(p))
            out.insert(out.end(), t.values.begin(), t.values.end());
        return out;
    }
}

TEST_CASE("Zero weights keep the hidden state at zero", "[lstm]")
{
    const LstmLayerParams layer = LstmLayerParams::zeros(4, 3);
    const std::vector<double> seq{1, 2, 3, -1, -2, -3};
    const LayerOutput out = lstm_forward(layer, seq, 2);
    for (double h : out.hidden_sequence)
        CHECK(h == 0.0);
    for (double c : out.final_cell)
        CHECK(c == 0.0);
}

TEST_CASE("Single-unit layer matches a hand trace", "[lstm]")
{
    LstmLayerParams layer = LstmLayerParams::zeros(1, 1);
    layer.input_weights = {0.5, -0.5, 1.0, 0.25};
    layer.recurrent_weights = {0.3, -0.2, 0.1, 0.4};
    layer.biases = {0.1, 1.0, 0.0, -0.2};
    const LayerOutput out = lstm_forward(layer, std::vector<double>{2.0, -1.0}, 2);
    REQUIRE(out.hidden_sequence.size() == 2);
    CHECK(std::abs(out.hidden_sequence[0] - 0.3555406349223034) < 1e-12);
    CHECK(std::abs(out.hidden_sequence[1] - 0.10959160646823372) < 1e-12);
    CHECK(std::abs(out.final_cell[0] - 0.26469404973518096) < 1e-12);
    CHECK(out.final_hidden[0] == out.hidden_sequence[1]);
}

TEST_CASE("Hidden states stay inside (-1, 1)", "[lstm]")
{
    ModelParams p = ModelParams::zeros(3, 10, 4);
    support::randomize(p, 5, 20.0);
    const WindowSet ws = support::random_windows(20, 10, 3, 4, 6);
    for (std::size_t i = 0; i < ws.size(); ++i)
    {
        const LayerOutput out = lstm_forward(p.layer1, ws[i].steps, 10);
        for (double h : out.hidden_sequence)
            REQUIRE(std::abs(h) <= 1.0);
    }
}

TEST_CASE("Model forward matches the nested-loop oracle", "[lstm][oracle]")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        ModelParams p = ModelParams::zeros(2, 10, 6);
        support::randomize(p, seed, 0.8);
        const WindowSet ws = support::random_windows(3, 3, 2, 6, seed + 100);
        const oracle::Net net = support::to_oracle(p);
        for (std::size_t i = 0; i < ws.size(); ++i)
        {
            const auto got = model_forward(p, ws[i]);
            const auto want = oracle::predict(net, support::steps_of(ws[i]));
            REQUIRE(got.size() == want.size());
            for (std::size_t o = 0; o < got.size(); ++o)
                REQUIRE(std::abs(got[o] - want[o]) < 1e-12);
        }
    }
}

TEST_CASE("Zero head weights output the head bias", "[lstm]")
{
    ModelParams p = ModelParams::zeros(2, 10, 3);
    support::randomize(p, 1, 0.5);
    std::fill(p.fc_weights.begin(), p.fc_weights.end(), 0.0);
    const WindowSet ws = support::random_windows(1, 4, 2, 3, 2);
    CHECK(model_forward(p, ws[0]) == p.fc_bias);
}

TEST_CASE("Mis-shaped windows are rejected", "[lstm][errors]")
{
    const ModelParams p = ModelParams::zeros(2, 10, 4);
    const WindowSet wrong_width = support::random_windows(1, 3, 5, 4, 1);
    CHECK_THROWS_AS(model_forward(p, wrong_width[0]), WidthMismatch);
    const WindowSet wrong_target = support::random_windows(1, 3, 2, 6, 1);
    CHECK_THROWS_AS(backward(p, wrong_target, iota_batch(1)), ShapeMismatch);
}

TEST_CASE("MSE examples", "[lstm]")
{
    CHECK(mse_loss(std::vector<double>(32, 1.0), std::vector<double>(32, 0.0)) == 1.0);
    CHECK(mse_loss(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
    CHECK_THROWS_AS(mse_loss(std::vector<double>{1, 2}, std::vector<double>{1}), ShapeMismatch);

    Rng rng(3);
    std::vector<double> a(320), b(320);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        a[i] = uniform_real(rng, -2, 2);
        b[i] = uniform_real(rng, -2, 2);
    }
    double naive = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        naive += (a[i] - b[i]) * (a[i] - b[i]);
    naive /= static_cast<double>(a.size());
    CHECK(std::abs(mse_loss(a, b) - naive) < 1e-14);
}

TEST_CASE("Zero residual gives a zero gradient", "[lstm][gradient]")
{
    ModelParams p = ModelParams::zeros(3, 5, 4);
    support::randomize(p, 8, 0.5);
    WindowSet ws = support::random_windows(2, 4, 3, 4, 9);
    for (std::size_t i = 0; i < ws.size(); ++i)
    {
        const auto y = model_forward(p, ws[i]);
        std::copy(y.begin(), y.end(), ws.targets.begin() + static_cast<std::ptrdiff_t>(i * 4));
    }
    const BatchGradient g = backward(p, ws, iota_batch(2));
    CHECK(g.loss == 0.0);
    for (double v : flat(g.gradient))
        REQUIRE(v == 0.0);
}

TEST_CASE("Backward matches central finite differences", "[lstm][gradient]")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        ModelParams p = ModelParams::zeros(3, 4, 4);
        support::randomize(p, seed, 0.6);
        const WindowSet ws = support::random_windows(3, 5, 3, 4, seed + 50);
        const auto batch = iota_batch(3);
        const BatchGradient g = backward(p, ws, batch);
        CHECK(std::abs(g.loss - batch_loss(p, ws, batch)) < 1e-14);

        auto grad_tensors = tensors(g.gradient);
        auto param_tensors = tensors(p);
        const double h = 1e-5;
        for (std::size_t t = 0; t < num_tensors; ++t)
            for (std::size_t k = 0; k < param_tensors[t].values.size(); ++k)
            {
                double &v = param_tensors[t].values[k];
                const double orig = v;
                v = orig + h;
                const double up = batch_loss(p, ws, batch);
                v = orig - h;
                const double down = batch_loss(p, ws, batch);
                v = orig;
                const double fd = (up - down) / (2 * h);
                const double an = grad_tensors[t].values[k];
                INFO(param_tensors[t].name << "[" << k << "] analytic " << an << " fd " << fd);
                REQUIRE(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3));
            }
    }
}

TEST_CASE("A batch gradient is the mean of single-sample gradients", "[lstm][gradient]")
{
    ModelParams p = ModelParams::zeros(3, 6, 4);
    support::randomize(p, 12, 0.5);
    const WindowSet ws = support::random_windows(2, 4, 3, 4, 13);
    const std::vector<std::size_t> one{0}, two{1}, both{0, 1};
    const auto g1 = flat(backward(p, ws, one).gradient);
    const auto g2 = flat(backward(p, ws, two).gradient);
    const auto g12 = flat(backward(p, ws, both).gradient);
    for (std::size_t i = 0; i < g12.size(); ++i)
        REQUIRE(std::abs(g12[i] - 0.5 * (g1[i] + g2[i])) < 1e-15 + 1e-13 * std::abs(g12[i]));
}

TEST_CASE("Parallel and serial kernels agree bit for bit", "[lstm][parallel]")
{
    ModelParams p = init_params(6, 4, 77);
    const WindowSet ws = support::random_windows(100, 10, 6, 8, 78);
    std::vector<std::size_t> batch(64);
    for (std::size_t i = 0; i < batch.size(); ++i)
        batch[i] = (i * 37) % ws.size();

    const int threads = omp_get_max_threads();
    omp_set_num_threads(4);
    const BatchGradient par = backward(p, ws, batch);
    const auto pred_par = predict_all(p, ws);
    omp_set_num_threads(threads);
    const BatchGradient ser = serial::backward(p, ws, batch);
    CHECK(par.loss == ser.loss);
    CHECK(par.gradient == ser.gradient);
    CHECK(pred_par == serial::predict_all(p, ws));
}

TEST_CASE("Initialisation bounds and forget bias", "[lstm]")
{
    const ModelParams p = init_params(34, 16, 9);
    CHECK(p.hidden() == 10);
    CHECK(p.feature_width() == 34);
    CHECK(p.output_width() == 32);
    const double b1 = 1.0 / std::sqrt(34.0), b2 = 1.0 / std::sqrt(10.0);
    for (double v : p.layer1.input_weights)
        REQUIRE(std::abs(v) <= b1);
    for (double v : p.layer1.recurrent_weights)
        REQUIRE(std::abs(v) <= b2);
    for (const auto *layer : {&p.layer1, &p.layer2})
        for (int j = 0; j < 40; ++j)
            CHECK(layer->biases[static_cast<std::size_t>(j)] == (j >= 10 && j < 20 ? 1.0 : 0.0));
    for (double v : p.fc_weights)
        REQUIRE(std::abs(v) <= b2);
    for (double v : p.fc_bias)
        CHECK(v == 0.0);

    CHECK(init_params(34, 16, 9) == p);
    CHECK_FALSE(init_params(34, 16, 10) == p);
    CHECK(p.num_values() == flat(p).size());
}
