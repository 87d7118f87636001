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

#ifndef CSIPM_EVALUATION_HPP
#define CSIPM_EVALUATION_HPP

#include "csipm/checkpoint.hpp"
#include "csipm/training.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace csipm
{
    // Windows for one feature set over a whole-vehicle split, with inputs
    // standardized by statistics of the training rows. Labels stay raw.
    struct PreparedData
    {
        WindowSet train;
        WindowSet test;
        Standardizer standardizer;
    };

    PreparedData prepare_data(const Dataset &dataset, FeatureSet features, int window, double train_fraction,
                              std::uint64_t split_seed);

    // Test-side windows for a saved model, using the checkpoint's standardizer.
    WindowSet prepare_test_windows(const Dataset &dataset, const Checkpoint &checkpoint);

    struct NamedDataset
    {
        std::string name;
        Dataset data;
    };

    struct AblationCell
    {
        std::string dataset;
        FeatureSet features;
        double mse = 0.0;
        double initial_mse = 0.0;
        std::vector<EpochStats> history;
    };

    struct AblationReport
    {
        std::vector<std::string> datasets;
        std::vector<FeatureSet> feature_sets;
        std::vector<AblationCell> cells; // dataset-major

        const AblationCell &cell(const std::string &dataset, FeatureSet features) const;
        // Plain mean over the mobility-only columns present (at most seven).
        std::optional<double> mobility_mean(const std::string &dataset) const;

        std::string to_table() const;
        std::string to_csv() const;
    };

    // (dataset, feature_set) -> mse, from either rendering.
    struct ParsedCell
    {
        std::string dataset;
        std::string feature_set;
        double mse = 0.0;
    };
    std::vector<ParsedCell> parse_ablation_csv(std::string_view text);
    std::vector<ParsedCell> parse_ablation_table(std::string_view text);

    struct AblationOptions
    {
        ModelConfig model;
        TrainConfig train;
        int window = 10;
        double train_fraction = 0.7;
        std::uint64_t master_seed = 0;
    };

    // One model per (dataset, feature set), trained from scratch. The split of a
    // dataset depends only on master_seed and is shared by all its cells; each
    // cell's training seed depends on the dataset name and the feature set.
    AblationReport run_ablation(const std::vector<NamedDataset> &datasets, const std::vector<FeatureSet> &feature_sets,
                                const AblationOptions &options);

    std::uint64_t split_seed(std::uint64_t master_seed);
    std::uint64_t cell_seed(std::uint64_t master_seed, const std::string &dataset, FeatureSet features);

    struct NearestResult
    {
        std::size_t by_mse = 0;
        std::size_t by_mae = 0;
        double mse = 0.0;
        double mae = 0.0;
        bool agree() const { return by_mse == by_mae; }
    };

    // Per-antenna amplitudes |h_m| of a flattened CSI vector.
    std::vector<double> amplitudes(std::span<const double> flat);

    // Test window whose label amplitudes are closest to the prediction's, under
    // mean squared and mean absolute difference. Ties go to the lowest index.
    NearestResult nearest_instance(std::span<const double> prediction, const WindowSet &test);

    struct ConstellationExport
    {
        std::string dataset;
        std::string feature_set;
        std::string instance;
        ChannelVector truth;
        ChannelVector predicted;

        bool operator==(const ConstellationExport &) const = default;
    };

    // "# csi-constellation v1", metadata comments, "series,index,re,im", then
    // M "true" rows and M "pred" rows.
    std::string format_constellation(const ConstellationExport &data);
    void export_constellation(const ConstellationExport &data, const std::filesystem::path &path);
    ConstellationExport parse_constellation(std::string_view text);
}

#endif
