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

#ifndef CSIPM_ERROR_HPP
#define CSIPM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace csipm
{
    // Base for every error raised by the library. Callers that only need a
    // diagnostic catch this; tests match the concrete kinds below.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidConfig : public Error { using Error::Error; };
    class PositionOutOfScene : public Error { using Error::Error; };
    class SubcarrierOutOfRange : public Error { using Error::Error; };
    class WidthMismatch : public Error { using Error::Error; };
    class ShapeMismatch : public Error { using Error::Error; };
    class EmptySplit : public Error { using Error::Error; };
    class IoFailure : public Error { using Error::Error; };

    class MalformedFile : public Error
    {
    public:
        MalformedFile(const std::string &path, std::size_t line, const std::string &what)
            : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
        std::size_t line() const { return line_; }

    private:
        std::size_t line_;
    };

    class MalformedCheckpoint : public MalformedFile
    {
    public:
        using MalformedFile::MalformedFile;
    };
}

#endif
