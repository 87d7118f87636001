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

#include "csipm/checkpoint.hpp"
#include "csipm/error.hpp"
#include "csipm/io.hpp"

#include <string>

namespace csipm
{
    namespace
    {
        void append_section(std::string &out, std::string_view name, int rows, int cols, std::span<const double> values)
        {
            out.append(name);
            out += ' ';
            out += std::to_string(rows);
            out += ' ';
            out += std::to_string(cols);
            out += '\n';
            for (int r = 0; r < rows; ++r)
            {
                for (int c = 0; c < cols; ++c)
                {
                    if (c > 0)
                        out += ' ';
                    io::append_number(out, values[static_cast<std::size_t>(r) * cols + c]);
                }
                out += '\n';
            }
        }

        class Reader
        {
        public:
            Reader(std::string_view text, const std::string &name) : text_(text), name_(name) {}

            std::string_view next_line()
            {
                while (pos_ < text_.size())
                {
                    const auto end = text_.find('\n', pos_);
                    std::string_view line = text_.substr(pos_, end == std::string_view::npos ? end : end - pos_);
                    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
                    ++line_no_;
                    if (!line.empty() && line.back() == '\r')
                        line.remove_suffix(1);
                    if (!io::split_whitespace(line).empty())
                        return line;
                }
                fail("unexpected end of file");
            }

            [[noreturn]] void fail(const std::string &what) const
            {
                throw MalformedCheckpoint(name_, line_no_, what);
            }

            // Reads "<name> <rows> <cols>" and the value block, checking the shape.
            void read_section(std::string_view expected_name, int rows, int cols, std::span<double> values)
            {
                const auto head = io::split_whitespace(next_line());
                if (head.size() != 3 || head[0] != expected_name)
                    fail("expected section '" + std::string(expected_name) + "'");
                const auto r = io::parse_number<int>(head[1]);
                const auto c = io::parse_number<int>(head[2]);
                if (!r || !c || *r != rows || *c != cols)
                    fail("section '" + std::string(expected_name) + "' should be " + std::to_string(rows) + " x " +
                         std::to_string(cols));
                for (int i = 0; i < rows; ++i)
                {
                    const auto fields = io::split_whitespace(next_line());
                    if (fields.size() != static_cast<std::size_t>(cols))
                        fail("section '" + std::string(expected_name) + "' row has " + std::to_string(fields.size()) +
                             " values, expected " + std::to_string(cols));
                    for (int j = 0; j < cols; ++j)
                    {
                        const auto v = io::parse_number<double>(fields[j]);
                        if (!v)
                            fail("bad number '" + std::string(fields[j]) + "' in section '" +
                                 std::string(expected_name) + "'");
                        values[static_cast<std::size_t>(i) * cols + j] = *v;
                    }
                }
            }

            std::string_view keyword_value(std::string_view key)
            {
                const auto fields = io::split_whitespace(next_line());
                if (fields.size() != 2 || fields[0] != key)
                    fail("expected '" + std::string(key) + " <value>'");
                return fields[1];
            }

            bool at_end()
            {
                while (pos_ < text_.size())
                {
                    const auto end = text_.find('\n', pos_);
                    const auto line = text_.substr(pos_, end == std::string_view::npos ? end : end - pos_);
                    if (!io::split_whitespace(line).empty())
                        return false;
                    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
                    ++line_no_;
                }
                return true;
            }

        private:
            std::string_view text_;
            std::string name_;
            std::size_t pos_ = 0;
            std::size_t line_no_ = 0;
        };

        std::optional<int> header_int(std::string_view field, std::string_view key)
        {
            if (field.size() <= key.size() + 1 || field.substr(0, key.size()) != key || field[key.size()] != '=')
                return std::nullopt;
            return io::parse_number<int>(field.substr(key.size() + 1));
        }
    }

    std::string format_checkpoint(const Checkpoint &ck)
    {
        const ModelParams &p = ck.params;
        std::string out = "csi-model v1 D=" + std::to_string(p.feature_width()) + " H=" + std::to_string(p.hidden()) +
                          " M=" + std::to_string(p.output_width() / 2) + "\n";
        out += "features " + ck.features.to_string() + "\n";
        out += "window " + std::to_string(ck.window) + "\n";
        out += "split ";
        io::append_number(out, ck.split_seed);
        out += ' ';
        io::append_number(out, ck.train_fraction);
        out += '\n';
        for (const auto &t : tensors(p))
            append_section(out, t.name, t.rows, t.cols, t.values);
        const int d = p.feature_width();
        append_section(out, "norm.mean", 1, d, ck.standardizer.mean);
        append_section(out, "norm.scale", 1, d, ck.standardizer.scale);
        for (const auto &t : tensors(ck.adam.m))
            append_section(out, "adam.m." + std::string(t.name), t.rows, t.cols, t.values);
        for (const auto &t : tensors(ck.adam.v))
            append_section(out, "adam.v." + std::string(t.name), t.rows, t.cols, t.values);
        out += "adam.t 1 1\n";
        io::append_number(out, ck.adam.t);
        out += '\n';
        return out;
    }

    void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path)
    {
        const ModelParams &p = checkpoint.params;
        if (checkpoint.standardizer.mean.size() != static_cast<std::size_t>(p.feature_width()) ||
            checkpoint.standardizer.scale.size() != static_cast<std::size_t>(p.feature_width()))
            throw WidthMismatch("checkpoint standardizer width does not match the model input width");
        const std::string text = format_checkpoint(checkpoint);
        io::AtomicFile file(path);
        file.write(text);
        file.commit();
    }

    Checkpoint parse_checkpoint(std::string_view text, const std::string &name)
    {
        Reader in(text, name);
        const auto header = io::split_whitespace(in.next_line());
        if (header.size() != 5 || header[0] != "csi-model" || header[1] != "v1")
            in.fail("expected header 'csi-model v1 D=<int> H=<int> M=<int>'");
        const auto d = header_int(header[2], "D");
        const auto h = header_int(header[3], "H");
        const auto m = header_int(header[4], "M");
        if (!d || !h || !m || *d < 1 || *h < 1 || *m < 1)
            in.fail("bad D, H or M in header");

        Checkpoint ck;
        try
        {
            ck.features = FeatureSet::parse(in.keyword_value("features"));
        }
        catch (const InvalidConfig &e)
        {
            in.fail(e.what());
        }
        if (ck.features.width(*m) != *d)
            in.fail("feature set '" + ck.features.to_string() + "' does not have width D=" + std::to_string(*d));
        const auto window = io::parse_number<int>(in.keyword_value("window"));
        if (!window || *window < 1)
            in.fail("bad window length");
        ck.window = *window;
        const auto split_fields = io::split_whitespace(in.next_line());
        if (split_fields.size() != 3 || split_fields[0] != "split")
            in.fail("expected 'split <seed> <train fraction>'");
        const auto seed = io::parse_number<std::uint64_t>(split_fields[1]);
        const double fraction = io::parse_number<double>(split_fields[2]).value_or(-1.0);
        if (!seed || !(fraction > 0.0 && fraction < 1.0))
            in.fail("bad split seed or train fraction");
        ck.split_seed = *seed;
        ck.train_fraction = fraction;

        ck.params = ModelParams::zeros(*d, *h, 2 * *m);
        for (auto &t : tensors(ck.params))
            in.read_section(t.name, t.rows, t.cols, t.values);
        ck.standardizer.mean.assign(static_cast<std::size_t>(*d), 0.0);
        ck.standardizer.scale.assign(static_cast<std::size_t>(*d), 0.0);
        in.read_section("norm.mean", 1, *d, ck.standardizer.mean);
        in.read_section("norm.scale", 1, *d, ck.standardizer.scale);
        for (double s : ck.standardizer.scale)
            if (!(s > 0.0))
                in.fail("norm.scale entries must be positive");

        ck.adam = AdamState::zeros_like(ck.params);
        for (auto &t : tensors(ck.adam.m))
            in.read_section("adam.m." + std::string(t.name), t.rows, t.cols, t.values);
        for (auto &t : tensors(ck.adam.v))
            in.read_section("adam.v." + std::string(t.name), t.rows, t.cols, t.values);
        const auto head = io::split_whitespace(in.next_line());
        if (head.size() != 3 || head[0] != "adam.t" || head[1] != "1" || head[2] != "1")
            in.fail("expected section 'adam.t 1 1'");
        const auto step = io::split_whitespace(in.next_line());
        if (step.size() != 1 || !io::parse_number<std::uint64_t>(step[0]))
            in.fail("bad adam.t value");
        ck.adam.t = *io::parse_number<std::uint64_t>(step[0]);
        if (!in.at_end())
            in.fail("unexpected content after adam.t");
        return ck;
    }

    Checkpoint load_checkpoint(const std::filesystem::path &path)
    {
        return parse_checkpoint(io::read_file(path), path.string());
    }
}
