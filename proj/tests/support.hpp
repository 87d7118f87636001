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

#ifndef CSIPM_TESTS_SUPPORT_HPP
#define CSIPM_TESTS_SUPPORT_HPP

#include "csipm/dataset.hpp"
#include "csipm/lstm.hpp"
#include "csipm/rng.hpp"
#include "oracles/lstm_oracle.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace support
{
    inline oracle::Net to_oracle(const csipm::ModelParams &p)
    {
        const std::size_t H = static_cast<std::size_t>(p.hidden());
        const std::size_t D = static_cast<std::size_t>(p.feature_width());
        const std::size_t O = static_cast<std::size_t>(p.output_width());
        oracle::Net n;
        n.l1 = {oracle::to_matrix(p.layer1.input_weights, 4 * H, D), oracle::to_matrix(p.layer1.recurrent_weights, 4 * H, H),
                p.layer1.biases};
        n.l2 = {oracle::to_matrix(p.layer2.input_weights, 4 * H, H), oracle::to_matrix(p.layer2.recurrent_weights, 4 * H, H),
                p.layer2.biases};
        n.V = oracle::to_matrix(p.fc_weights, O, H);
        n.c = p.fc_bias;
        return n;
    }

    inline oracle::Matrix steps_of(const csipm::WindowView &w)
    {
        return oracle::to_matrix(std::vector<double>(w.steps.begin(), w.steps.end()), static_cast<std::size_t>(w.length),
                                 static_cast<std::size_t>(w.width));
    }

    // n independent windows of the given shape with uniform entries.
    inline csipm::WindowSet random_windows(std::size_t n, int window, int width, int target_width, std::uint64_t seed,
                                           double target_scale = 1.0)
    {
        csipm::WindowSet ws;
        ws.features = csipm::FeatureSet(csipm::FeatureSet::pos);
        ws.window = window;
        ws.width = width;
        ws.target_width = target_width;
        csipm::Rng rng(seed);
        for (std::size_t i = 0; i < n; ++i)
        {
            ws.starts.push_back(ws.num_rows());
            for (int r = 0; r < window * width; ++r)
                ws.rows.push_back(csipm::uniform_real(rng, -1.0, 1.0));
            for (int t = 0; t < target_width; ++t)
                ws.targets.push_back(target_scale * csipm::uniform_real(rng, -1.0, 1.0));
            ws.info.push_back({i, 0.0});
        }
        return ws;
    }

    inline void randomize(csipm::ModelParams &p, std::uint64_t seed, double scale)
    {
        csipm::Rng rng(seed);
        for (auto &t : csipm::tensors(p))
            for (double &v : t.values)
                v = csipm::uniform_real(rng, -scale, scale);
    }

    // Per-test scratch directory, emptied on creation.
    inline std::filesystem::path scratch(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("csipm_test_" + name);
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    // A small dataset quick enough for unit tests.
    inline csipm::Dataset small_dataset(std::size_t target, std::uint64_t seed, int range = 250)
    {
        csipm::SimulationSetup setup;
        csipm::DatasetConfig dc;
        dc.target_instances = target;
        dc.max_row_distance = range;
        return csipm::build_dataset(setup, dc, seed);
    }
}

#endif
