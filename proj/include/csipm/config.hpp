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

#ifndef CSIPM_CONFIG_HPP
#define CSIPM_CONFIG_HPP

#include "csipm/dataset.hpp"
#include "csipm/lstm.hpp"
#include "csipm/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace csipm
{
    struct RunConfig
    {
        SimulationSetup setup;
        DatasetConfig dataset;
        ModelConfig model;
        TrainConfig train;
        std::uint64_t seed = 42;

        // Sets "section.key" from its text form. Throws InvalidConfig for
        // unknown keys and unparsable values.
        void set(std::string_view key, std::string_view value);
        void validate() const;
        // Every key with its current value, one "section.key = value" per line.
        std::string to_text() const;

        static std::vector<std::string> keys();
    };

    // Line-oriented "section.key = value"; '#' starts a comment. Later lines win.
    void apply_config_text(RunConfig &config, std::string_view text, const std::string &name);
    RunConfig load_config(const std::filesystem::path &path);
}

#endif
