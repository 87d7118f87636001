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

#ifndef CSIPM_CHECKPOINT_HPP
#define CSIPM_CHECKPOINT_HPP

#include "csipm/training.hpp"
#include "csipm/windows.hpp"

#include <filesystem>
#include <optional>

namespace csipm
{
    // A trained model plus what is needed to feed it new data: the feature
    // set, the window length and the input standardization fitted on training rows.
    struct Checkpoint
    {
        ModelParams params;
        AdamState adam;
        FeatureSet features;
        int window = 10;
        // The whole-vehicle split the model was trained on, so evaluation can
        // rebuild the same held-out side.
        std::uint64_t split_seed = 0;
        double train_fraction = 0.7;
        Standardizer standardizer;

        bool operator==(const Checkpoint &) const = default;
    };

    // Text format: "csi-model v1 D=<int> H=<int> M=<int>", then "features <set>",
    // "window <int>", "split <seed> <train fraction>", and named sections "<name> <rows> <cols>" each followed by
    // <rows> lines of <cols> whitespace-separated numbers: the model tensors,
    // norm.mean, norm.scale, adam.m.*, adam.v.*, adam.t.
    void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
    std::string format_checkpoint(const Checkpoint &checkpoint);
    Checkpoint load_checkpoint(const std::filesystem::path &path);
    Checkpoint parse_checkpoint(std::string_view text, const std::string &name);
}

#endif
