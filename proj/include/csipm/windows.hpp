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

#ifndef CSIPM_WINDOWS_HPP
#define CSIPM_WINDOWS_HPP

#include "csipm/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csipm
{
    // Subset of {Acc, Speed, Pos, CSI1, CSI2}; CSI1 is the CSI at the current
    // timestep, CSI2 the CSI one timestep earlier.
    class FeatureSet
    {
    public:
        enum Channel : unsigned
        {
            acc = 1u << 0,
            speed = 1u << 1,
            pos = 1u << 2,
            csi1 = 1u << 3,
            csi2 = 1u << 4,
        };

        FeatureSet() = default;
        explicit FeatureSet(unsigned mask);

        // "+"-joined lowercase tokens, e.g. "csi1+csi2+pos".
        static FeatureSet parse(std::string_view text);
        std::string to_string() const;
        // Column label used in ablation tables, e.g. "CSI1+Pos.".
        std::string display_name() const;

        bool has(Channel c) const { return (mask_ & c) != 0; }
        unsigned mask() const { return mask_; }
        // Per-timestep feature vector length for M antennas.
        int width(int num_antennas) const;

        bool operator==(const FeatureSet &) const = default;

        // The ten columns of the reference ablation table, in table order.
        static std::vector<FeatureSet> ablation_defaults();

    private:
        unsigned mask_ = 0;
    };

    struct WindowInfo
    {
        std::uint64_t vehicle_id = 0;
        double t_s = 0.0; // time of the final timestep
    };

    struct WindowView
    {
        std::span<const double> steps; // length x width, row-major
        std::span<const double> target;
        int length = 0;
        int width = 0;
    };

    // Sliding windows over per-vehicle feature rows. Windows of one vehicle
    // share the rows table, so a window is just an offset into it.
    class WindowSet
    {
    public:
        FeatureSet features;
        int window = 0;
        int width = 0;
        int target_width = 0;
        std::size_t too_short_traces = 0;

        std::vector<double> rows;    // feature rows, row-major
        std::vector<double> targets; // one target per window
        std::vector<std::size_t> starts;
        std::vector<WindowInfo> info;

        std::size_t size() const { return starts.size(); }
        bool empty() const { return starts.empty(); }
        std::size_t num_rows() const { return width == 0 ? 0 : rows.size() / static_cast<std::size_t>(width); }

        WindowView operator[](std::size_t i) const
        {
            const std::size_t w = static_cast<std::size_t>(width);
            return {std::span<const double>(rows).subspan(starts[i] * w, static_cast<std::size_t>(window) * w),
                    std::span<const double>(targets).subspan(i * static_cast<std::size_t>(target_width), static_cast<std::size_t>(target_width)),
                    window, width};
        }
    };

    // Per timestep, in this order: [accel] [speed] [x, y] [CSI now (2M)] [CSI previous (2M)].
    // Target is label_next of the window's final timestep. Vehicles too short for
    // one window are skipped and counted.
    WindowSet make_windows(const Dataset &part, FeatureSet features, int window = 10);

    // Per-channel affine standardization fitted on training rows.
    struct Standardizer
    {
        std::vector<double> mean;
        std::vector<double> scale;

        static Standardizer fit(const WindowSet &windows);
        void apply(WindowSet &windows) const;

        bool operator==(const Standardizer &) const = default;
    };
}

#endif
