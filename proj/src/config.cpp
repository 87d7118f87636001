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

#include "csipm/config.hpp"
#include "csipm/error.hpp"
#include "csipm/io.hpp"

#include <functional>

namespace csipm
{
    namespace
    {
        struct Key
        {
            const char *name;
            std::function<void(RunConfig &, std::string_view)> set;
            std::function<std::string(const RunConfig &)> get;
        };

        template <typename T>
        T parse_value(std::string_view key, std::string_view text)
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (text == "true" || text == "1")
                    return true;
                if (text == "false" || text == "0")
                    return false;
                throw InvalidConfig(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
            }
            else
            {
                const auto v = io::parse_number<T>(text);
                if (!v)
                    throw InvalidConfig(std::string(key) + ": cannot parse '" + std::string(text) + "'");
                return *v;
            }
        }

        template <typename T>
        std::string format_value(T v)
        {
            if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else if constexpr (std::is_floating_point_v<T>)
            {
                std::string s;
                io::append_number(s, v);
                return s;
            }
            else
                return std::to_string(v);
        }

        // Builds a Key from an accessor returning a reference to the field.
        template <typename Access>
        Key key(const char *name, Access access)
        {
            using T = std::remove_reference_t<decltype(access(std::declval<RunConfig &>()))>;
            return Key{name,
                       [name, access](RunConfig &c, std::string_view text) { access(c) = parse_value<T>(name, text); },
                       [access](const RunConfig &c) { return format_value(access(const_cast<RunConfig &>(c))); }};
        }

        const std::vector<Key> &key_table()
        {
            static const std::vector<Key> table = {
                key("scene.street_length_m", [](RunConfig &c) -> double & { return c.setup.scene.street_length_m; }),
                key("scene.street_width_m", [](RunConfig &c) -> double & { return c.setup.scene.street_width_m; }),
                key("scene.grid_step_m", [](RunConfig &c) -> double & { return c.setup.scene.grid_step_m; }),
                key("scene.gnb_x_m", [](RunConfig &c) -> double & { return c.setup.scene.gnb_position_m.x; }),
                key("scene.gnb_y_m", [](RunConfig &c) -> double & { return c.setup.scene.gnb_position_m.y; }),
                key("scene.gnb_z_m", [](RunConfig &c) -> double & { return c.setup.scene.gnb_position_m.z; }),
                key("scene.wall_reflectivity", [](RunConfig &c) -> double & { return c.setup.scene.wall_reflectivity; }),
                key("scene.antenna_height_m", [](RunConfig &c) -> double & { return c.setup.scene.antenna_height_m; }),
                key("array.m_x", [](RunConfig &c) -> int & { return c.setup.geometry.m_x; }),
                key("array.m_y", [](RunConfig &c) -> int & { return c.setup.geometry.m_y; }),
                key("array.m_z", [](RunConfig &c) -> int & { return c.setup.geometry.m_z; }),
                key("array.spacing_over_lambda", [](RunConfig &c) -> double & { return c.setup.geometry.spacing_over_lambda; }),
                key("channel.carrier_hz", [](RunConfig &c) -> double & { return c.setup.channel.carrier_hz; }),
                key("channel.bandwidth_hz", [](RunConfig &c) -> double & { return c.setup.channel.bandwidth_hz; }),
                key("channel.num_subcarriers", [](RunConfig &c) -> int & { return c.setup.channel.num_subcarriers; }),
                key("channel.max_paths", [](RunConfig &c) -> int & { return c.setup.channel.max_paths; }),
                key("mobility.v_min_mps", [](RunConfig &c) -> double & { return c.setup.mobility.v_min_mps; }),
                key("mobility.v_max_mps", [](RunConfig &c) -> double & { return c.setup.mobility.v_max_mps; }),
                key("mobility.delta_tau_s", [](RunConfig &c) -> double & { return c.setup.mobility.delta_tau_s; }),
                key("fsmc.s", [](RunConfig &c) -> int & { return c.setup.fsmc.s; }),
                key("fsmc.a_max", [](RunConfig &c) -> double & { return c.setup.fsmc.a_max; }),
                key("fsmc.p", [](RunConfig &c) -> double & { return c.setup.fsmc.p; }),
                key("dataset.ref_subcarrier", [](RunConfig &c) -> int & { return c.dataset.ref_subcarrier; }),
                key("dataset.both_directions", [](RunConfig &c) -> bool & { return c.dataset.both_directions; }),
                key("dataset.max_vehicles", [](RunConfig &c) -> std::size_t & { return c.dataset.max_vehicles; }),
                key("dataset.window", [](RunConfig &c) -> int & { return c.dataset.window; }),
                key("dataset.train_fraction", [](RunConfig &c) -> double & { return c.dataset.train_fraction; }),
                key("model.hidden", [](RunConfig &c) -> int & { return c.model.hidden; }),
                key("train.learning_rate", [](RunConfig &c) -> double & { return c.train.learning_rate; }),
                key("train.beta1", [](RunConfig &c) -> double & { return c.train.beta1; }),
                key("train.beta2", [](RunConfig &c) -> double & { return c.train.beta2; }),
                key("train.epsilon", [](RunConfig &c) -> double & { return c.train.epsilon; }),
                key("train.batch_size", [](RunConfig &c) -> std::size_t & { return c.train.batch_size; }),
                key("train.epochs", [](RunConfig &c) -> int & { return c.train.epochs; }),
                key("run.seed", [](RunConfig &c) -> std::uint64_t & { return c.seed; }),
            };
            return table;
        }
    }

    void RunConfig::set(std::string_view name, std::string_view value)
    {
        for (const Key &k : key_table())
            if (name == k.name)
            {
                k.set(*this, value);
                return;
            }
        throw InvalidConfig("unknown configuration key '" + std::string(name) + "'");
    }

    std::vector<std::string> RunConfig::keys()
    {
        std::vector<std::string> out;
        for (const Key &k : key_table())
            out.emplace_back(k.name);
        return out;
    }

    std::string RunConfig::to_text() const
    {
        std::string out;
        for (const Key &k : key_table())
            out += std::string(k.name) + " = " + k.get(*this) + "\n";
        return out;
    }

    void RunConfig::validate() const
    {
        setup.scene.validate();
        setup.geometry.validate();
        setup.channel.validate();
        setup.mobility.validate();
        setup.fsmc.validate();
        train.validate();
        if (dataset.ref_subcarrier < 0 || dataset.ref_subcarrier >= setup.channel.num_subcarriers)
            throw InvalidConfig("dataset.ref_subcarrier must lie in [0, channel.num_subcarriers)");
        if (dataset.max_vehicles < 1)
            throw InvalidConfig("dataset.max_vehicles must be >= 1");
        if (dataset.window < 1)
            throw InvalidConfig("dataset.window must be >= 1");
        if (!(dataset.train_fraction > 0.0 && dataset.train_fraction < 1.0))
            throw InvalidConfig("dataset.train_fraction must lie in (0, 1)");
        if (model.hidden < 1)
            throw InvalidConfig("model.hidden must be >= 1");
    }

    void apply_config_text(RunConfig &config, std::string_view text, const std::string &name)
    {
        const auto lines = io::split(text, '\n');
        for (std::size_t n = 0; n < lines.size(); ++n)
        {
            std::string_view line = lines[n];
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            const auto words = io::split_whitespace(line);
            if (words.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw MalformedFile(name, n + 1, "expected 'section.key = value'");
            const auto k = io::split_whitespace(line.substr(0, eq));
            const auto v = io::split_whitespace(line.substr(eq + 1));
            if (k.size() != 1 || v.size() != 1)
                throw MalformedFile(name, n + 1, "expected 'section.key = value'");
            try
            {
                config.set(k[0], v[0]);
            }
            catch (const InvalidConfig &e)
            {
                throw MalformedFile(name, n + 1, e.what());
            }
        }
    }

    RunConfig load_config(const std::filesystem::path &path)
    {
        RunConfig config;
        apply_config_text(config, io::read_file(path), path.string());
        return config;
    }
}
