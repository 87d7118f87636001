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

#include "csipm/dataset.hpp"
#include "csipm/io.hpp"

#include <sstream>

namespace csipm::io
{
    std::vector<std::string_view> split(std::string_view text, char sep)
    {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (true)
        {
            const auto pos = text.find(sep, start);
            if (pos == std::string_view::npos)
            {
                parts.push_back(text.substr(start));
                return parts;
            }
            parts.push_back(text.substr(start, pos - start));
            start = pos + 1;
        }
    }

    std::vector<std::string_view> split_whitespace(std::string_view text)
    {
        std::vector<std::string_view> parts;
        std::size_t i = 0;
        while (i < text.size())
        {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r'))
                ++i;
            const std::size_t start = i;
            while (i < text.size() && !(text[i] == ' ' || text[i] == '\t' || text[i] == '\r'))
                ++i;
            if (i > start)
                parts.push_back(text.substr(start, i - start));
        }
        return parts;
    }

    AtomicFile::AtomicFile(std::filesystem::path path)
        : path_(std::move(path)), tmp_(path_.string() + ".tmp")
    {
        if (path_.has_parent_path())
        {
            std::error_code ec;
            std::filesystem::create_directories(path_.parent_path(), ec);
        }
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw IoFailure("cannot open " + tmp_.string() + " for writing");
    }

    AtomicFile::~AtomicFile()
    {
        if (!committed_)
        {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    void AtomicFile::commit()
    {
        out_.flush();
        if (!out_)
            throw IoFailure("write to " + tmp_.string() + " failed");
        out_.close();
        std::error_code ec;
        std::filesystem::rename(tmp_, path_, ec);
        if (ec)
            throw IoFailure("cannot move " + tmp_.string() + " to " + path_.string() + ": " + ec.message());
        committed_ = true;
    }

    std::string read_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoFailure("cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

namespace csipm
{
    namespace
    {
        // Value of "key=<value>" in a header token.
        std::optional<std::string_view> header_field(std::string_view token, std::string_view key)
        {
            if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=')
                return std::nullopt;
            return token.substr(key.size() + 1);
        }

        struct LineReader
        {
            const std::string &text;
            std::size_t pos = 0;
            std::size_t line_no = 0;

            bool next(std::string_view &line)
            {
                if (pos >= text.size())
                    return false;
                auto end = text.find('\n', pos);
                if (end == std::string::npos)
                    end = text.size();
                line = std::string_view(text).substr(pos, end - pos);
                if (!line.empty() && line.back() == '\r')
                    line.remove_suffix(1);
                pos = end + 1;
                ++line_no;
                return true;
            }
        };
    }

    void serialize_dataset(const Dataset &dataset, const std::filesystem::path &path)
    {
        io::AtomicFile file(path);
        std::string line = "csi-dataset v1 M=" + std::to_string(dataset.num_antennas) + " dt=";
        io::append_number(line, dataset.delta_tau_s);
        line += '\n';
        file.write(line);

        const std::size_t width = 2 * static_cast<std::size_t>(dataset.num_antennas);
        for (const DatasetInstance &inst : dataset.instances)
        {
            if (inst.csi_now.size() != width || inst.label_next.size() != width)
                throw ShapeMismatch("instance CSI width does not match M=" + std::to_string(dataset.num_antennas));
            line.clear();
            io::append_number(line, inst.vehicle_id);
            for (double v : {inst.t_s, inst.x_m, inst.y_m, inst.speed_mps, inst.accel_mps2})
            {
                line += ',';
                io::append_number(line, v);
            }
            for (double v : inst.csi_now)
            {
                line += ',';
                io::append_number(line, v);
            }
            for (double v : inst.label_next)
            {
                line += ',';
                io::append_number(line, v);
            }
            line += '\n';
            file.write(line);
        }
        file.commit();
    }

    Dataset deserialize_dataset(const std::filesystem::path &path)
    {
        const std::string text = io::read_file(path);
        const std::string name = path.string();
        LineReader reader{text};
        std::string_view line;
        if (!reader.next(line))
            throw MalformedFile(name, 1, "missing header");

        const auto header = io::split_whitespace(line);
        if (header.size() != 4 || header[0] != "csi-dataset" || header[1] != "v1")
            throw MalformedFile(name, 1, "expected header 'csi-dataset v1 M=<int> dt=<float>'");
        const auto m_text = header_field(header[2], "M");
        const auto dt_text = header_field(header[3], "dt");
        std::optional<int> m;
        std::optional<double> dt;
        if (m_text)
            m = io::parse_number<int>(*m_text);
        if (dt_text)
            dt = io::parse_number<double>(*dt_text);
        if (!m || *m < 1)
            throw MalformedFile(name, 1, "bad M field");
        if (!dt || !(*dt > 0.0))
            throw MalformedFile(name, 1, "bad dt field");

        Dataset ds;
        ds.num_antennas = *m;
        ds.delta_tau_s = *dt;
        const std::size_t width = 2 * static_cast<std::size_t>(*m);
        const std::size_t expected = 6 + 2 * width;

        while (reader.next(line))
        {
            if (line.empty())
                continue;
            const auto fields = io::split(line, ',');
            if (fields.size() != expected)
                throw MalformedFile(name, reader.line_no, "expected " + std::to_string(expected) + " fields, found " +
                                                              std::to_string(fields.size()));
            auto number = [&](std::size_t i)
            {
                const auto v = io::parse_number<double>(fields[i]);
                if (!v)
                    throw MalformedFile(name, reader.line_no, "field " + std::to_string(i + 1) + " is not a number: '" +
                                                                  std::string(fields[i]) + "'");
                return *v;
            };
            const auto vid = io::parse_number<std::uint64_t>(fields[0]);
            if (!vid)
                throw MalformedFile(name, reader.line_no, "field 1 is not a vehicle id");

            DatasetInstance inst;
            inst.vehicle_id = *vid;
            inst.t_s = number(1);
            inst.x_m = number(2);
            inst.y_m = number(3);
            inst.speed_mps = number(4);
            inst.accel_mps2 = number(5);
            inst.csi_now.resize(width);
            inst.label_next.resize(width);
            for (std::size_t i = 0; i < width; ++i)
            {
                inst.csi_now[i] = number(6 + i);
                inst.label_next[i] = number(6 + width + i);
            }
            ds.instances.push_back(std::move(inst));
        }
        return ds;
    }

    void serialize_traces(std::span<const Trace> traces, double delta_tau_s, const std::filesystem::path &path)
    {
        io::AtomicFile file(path);
        std::string line = "csi-trace v1 dt=";
        io::append_number(line, delta_tau_s);
        line += '\n';
        file.write(line);
        for (const Trace &trace : traces)
            for (const VehicleState &v : trace)
            {
                line.clear();
                io::append_number(line, v.vehicle_id);
                line += ',';
                line += std::to_string(v.tick);
                for (double x : {v.t_s, v.lateral_m, v.longitudinal_m, v.speed_mps})
                {
                    line += ',';
                    io::append_number(line, x);
                }
                line += ',';
                line += std::to_string(v.accel_state);
                line += '\n';
                file.write(line);
            }
        file.commit();
    }

    std::vector<Trace> deserialize_traces(const std::filesystem::path &path)
    {
        const std::string text = io::read_file(path);
        const std::string name = path.string();
        LineReader reader{text};
        std::string_view line;
        if (!reader.next(line))
            throw MalformedFile(name, 1, "missing header");
        const auto header = io::split_whitespace(line);
        if (header.size() != 3 || header[0] != "csi-trace" || header[1] != "v1" || !header_field(header[2], "dt"))
            throw MalformedFile(name, 1, "expected header 'csi-trace v1 dt=<float>'");

        std::vector<Trace> traces;
        while (reader.next(line))
        {
            if (line.empty())
                continue;
            const auto f = io::split(line, ',');
            if (f.size() != 7)
                throw MalformedFile(name, reader.line_no, "expected 7 fields, found " + std::to_string(f.size()));
            const auto vid = io::parse_number<std::uint64_t>(f[0]);
            const auto tick = io::parse_number<std::int64_t>(f[1]);
            const auto t = io::parse_number<double>(f[2]);
            const auto x = io::parse_number<double>(f[3]);
            const auto y = io::parse_number<double>(f[4]);
            const auto speed = io::parse_number<double>(f[5]);
            const auto state = io::parse_number<int>(f[6]);
            if (!vid || !tick || !t || !x || !y || !speed || !state)
                throw MalformedFile(name, reader.line_no, "unparsable field");
            VehicleState v;
            v.vehicle_id = *vid;
            v.tick = *tick;
            v.t_s = *t;
            v.lateral_m = *x;
            v.longitudinal_m = *y;
            v.speed_mps = *speed;
            v.accel_state = *state;
            if (traces.empty() || traces.back().back().vehicle_id != v.vehicle_id)
                traces.emplace_back();
            traces.back().push_back(v);
        }
        return traces;
    }
}
