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

#ifndef CSIPM_IO_HPP
#define CSIPM_IO_HPP

#include "csipm/error.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace csipm::io
{
    // Shortest decimal that parses back to the same double.
    inline void append_number(std::string &out, double value)
    {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), value);
        out.append(buf, res.ptr);
    }

    inline void append_number(std::string &out, std::uint64_t value)
    {
        char buf[24];
        const auto res = std::to_chars(buf, buf + sizeof(buf), value);
        out.append(buf, res.ptr);
    }

    template <typename T>
    std::optional<T> parse_number(std::string_view text)
    {
        while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
            text.remove_prefix(1);
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
            text.remove_suffix(1);
        if (!text.empty() && text.front() == '+')
            text.remove_prefix(1);
        T value{};
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
            return std::nullopt;
        return value;
    }

    std::vector<std::string_view> split(std::string_view text, char sep);
    std::vector<std::string_view> split_whitespace(std::string_view text);

    // Writes go to "<path>.tmp" and are renamed over <path> by commit(). An
    // uncommitted file is removed on destruction, so failures leave no partial output.
    class AtomicFile
    {
    public:
        explicit AtomicFile(std::filesystem::path path);
        AtomicFile(const AtomicFile &) = delete;
        AtomicFile &operator=(const AtomicFile &) = delete;
        ~AtomicFile();

        std::ofstream &stream() { return out_; }
        void write(std::string_view text) { out_.write(text.data(), static_cast<std::streamsize>(text.size())); }
        void commit();

    private:
        std::filesystem::path path_;
        std::filesystem::path tmp_;
        std::ofstream out_;
        bool committed_ = false;
    };

    std::string read_file(const std::filesystem::path &path);
}

#endif
