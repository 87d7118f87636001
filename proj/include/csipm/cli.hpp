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

#ifndef CSIPM_CLI_HPP
#define CSIPM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace csipm::cli
{
    // Runs the command line in-process. Returns the process exit code; all
    // diagnostics go to err.
    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

    // Instance targets of the three reference datasets, keyed by row distance.
    std::size_t default_target_instances(int row_distance);
}

#endif
