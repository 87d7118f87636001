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

#include "csipm/windows.hpp"
#include "csipm/error.hpp"

#include <cmath>

namespace csipm
{
    namespace
    {
        struct Token
        {
            std::string_view name;
            std::string_view display;
            FeatureSet::Channel channel;
        };

        constexpr Token tokens[] = {
            {"acc", "Acc.", FeatureSet::acc},
            {"speed", "Speed", FeatureSet::speed},
            {"csi1", "CSI1", FeatureSet::csi1},
            {"csi2", "CSI2", FeatureSet::csi2},
            {"pos", "Pos.", FeatureSet::pos},
        };
    }

    FeatureSet::FeatureSet(unsigned mask) : mask_(mask)
    {
        if (mask_ == 0 || (mask_ & ~0x1Fu) != 0)
            throw InvalidConfig("feature set must be a non-empty subset of {acc, speed, pos, csi1, csi2}");
        if (has(csi2) && !has(csi1))
            throw InvalidConfig("feature set: csi2 requires csi1");
    }

    FeatureSet FeatureSet::parse(std::string_view text)
    {
        unsigned mask = 0;
        std::size_t start = 0;
        while (start <= text.size())
        {
            auto end = text.find('+', start);
            if (end == std::string_view::npos)
                end = text.size();
            const auto part = text.substr(start, end - start);
            bool found = false;
            for (const Token &t : tokens)
                if (t.name == part)
                {
                    if (mask & t.channel)
                        throw InvalidConfig("feature set '" + std::string(text) + "' repeats '" + std::string(part) + "'");
                    mask |= t.channel;
                    found = true;
                }
            if (!found)
                throw InvalidConfig("unknown feature '" + std::string(part) + "' in '" + std::string(text) +
                                    "' (expected acc, speed, pos, csi1, csi2)");
            start = end + 1;
        }
        return FeatureSet(mask);
    }

    std::string FeatureSet::to_string() const
    {
        // Canonical token order follows the per-timestep layout.
        std::string out;
        for (Channel c : {acc, speed, pos, csi1, csi2})
            if (has(c))
            {
                if (!out.empty())
                    out += '+';
                for (const Token &t : tokens)
                    if (t.channel == c)
                        out += t.name;
            }
        return out;
    }

    std::string FeatureSet::display_name() const
    {
        // Table order puts CSI columns before position.
        std::string out;
        for (Channel c : {acc, speed, csi1, csi2, pos})
            if (has(c))
            {
                if (!out.empty())
                    out += '+';
                for (const Token &t : tokens)
                    if (t.channel == c)
                        out += t.display;
            }
        return out;
    }

    int FeatureSet::width(int num_antennas) const
    {
        int w = 0;
        if (has(acc))
            w += 1;
        if (has(speed))
            w += 1;
        if (has(pos))
            w += 2;
        if (has(csi1))
            w += 2 * num_antennas;
        if (has(csi2))
            w += 2 * num_antennas;
        return w;
    }

    std::vector<FeatureSet> FeatureSet::ablation_defaults()
    {
        return {FeatureSet(acc), FeatureSet(speed), FeatureSet(pos),
                FeatureSet(acc | speed), FeatureSet(acc | pos), FeatureSet(speed | pos),
                FeatureSet(acc | speed | pos), FeatureSet(csi1), FeatureSet(csi1 | pos),
                FeatureSet(csi1 | csi2 | pos)};
    }

    WindowSet make_windows(const Dataset &part, FeatureSet features, int window)
    {
        if (window < 1)
            throw InvalidConfig("window must be >= 1");
        if (features.mask() == 0)
            throw InvalidConfig("empty feature set");

        WindowSet out;
        out.features = features;
        out.window = window;
        out.width = features.width(part.num_antennas);
        out.target_width = 2 * part.num_antennas;

        const bool needs_previous = features.has(FeatureSet::csi2);
        const auto &all = part.instances;
        std::size_t begin = 0;
        while (begin < all.size())
        {
            std::size_t end = begin;
            while (end < all.size() && all[end].vehicle_id == all[begin].vehicle_id)
                ++end;

            // With CSI2 the first instance only serves as the "previous" CSI.
            const std::size_t first = begin + (needs_previous ? 1 : 0);
            const std::size_t usable = end > first ? end - first : 0;
            if (usable < static_cast<std::size_t>(window))
            {
                ++out.too_short_traces;
                begin = end;
                continue;
            }

            const std::size_t row_base = out.num_rows();
            for (std::size_t r = first; r < end; ++r)
            {
                const DatasetInstance &inst = all[r];
                if (features.has(FeatureSet::acc))
                    out.rows.push_back(inst.accel_mps2);
                if (features.has(FeatureSet::speed))
                    out.rows.push_back(inst.speed_mps);
                if (features.has(FeatureSet::pos))
                {
                    out.rows.push_back(inst.x_m);
                    out.rows.push_back(inst.y_m);
                }
                if (features.has(FeatureSet::csi1))
                    out.rows.insert(out.rows.end(), inst.csi_now.begin(), inst.csi_now.end());
                if (needs_previous)
                    out.rows.insert(out.rows.end(), all[r - 1].csi_now.begin(), all[r - 1].csi_now.end());
            }
            for (std::size_t s = 0; s + window <= usable; ++s)
            {
                const DatasetInstance &last = all[first + s + window - 1];
                out.starts.push_back(row_base + s);
                out.targets.insert(out.targets.end(), last.label_next.begin(), last.label_next.end());
                out.info.push_back({last.vehicle_id, last.t_s});
            }
            begin = end;
        }
        return out;
    }

    Standardizer Standardizer::fit(const WindowSet &windows)
    {
        const std::size_t w = static_cast<std::size_t>(windows.width);
        const std::size_t n = windows.num_rows();
        Standardizer s;
        s.mean.assign(w, 0.0);
        s.scale.assign(w, 1.0);
        if (n == 0)
            return s;

        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < w; ++c)
                s.mean[c] += windows.rows[r * w + c];
        for (double &m : s.mean)
            m /= static_cast<double>(n);

        std::vector<double> var(w, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < w; ++c)
            {
                const double d = windows.rows[r * w + c] - s.mean[c];
                var[c] += d * d;
            }
        for (std::size_t c = 0; c < w; ++c)
        {
            const double sd = std::sqrt(var[c] / static_cast<double>(n));
            // Constant channels are centred but left unscaled.
            s.scale[c] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }

    void Standardizer::apply(WindowSet &windows) const
    {
        const std::size_t w = static_cast<std::size_t>(windows.width);
        if (mean.size() != w || scale.size() != w)
            throw WidthMismatch("standardizer width " + std::to_string(mean.size()) + " != window width " + std::to_string(w));
        const std::size_t n = windows.num_rows();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < w; ++c)
            {
                double &v = windows.rows[r * w + c];
                v = (v - mean[c]) / scale[c];
            }
    }
}
