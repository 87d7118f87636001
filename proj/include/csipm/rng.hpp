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

#ifndef CSIPM_RNG_HPP
#define CSIPM_RNG_HPP

#include <cstdint>
#include <random>

namespace csipm
{
    // std::mt19937_64 has a standard-mandated output sequence. The standard
    // distributions do not, so the few draws we need are done by hand to keep
    // datasets byte-identical across standard libraries.
    using Rng = std::mt19937_64;

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Independent stream seed for (master, stream tag, index).
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0)
    {
        return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
    }

    namespace stream
    {
        inline constexpr std::uint64_t vehicle = 0x7665686963ull;
        inline constexpr std::uint64_t split = 0x73706c6974ull;
        inline constexpr std::uint64_t init = 0x696e6974ull;
        inline constexpr std::uint64_t shuffle = 0x73687566ull;
    }

    // Uniform on [0, 1) with 53 random bits.
    inline double uniform01(Rng &rng)
    {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    inline double uniform_real(Rng &rng, double lo, double hi)
    {
        return lo + (hi - lo) * uniform01(rng);
    }

    // Uniform on {0, ..., n-1}; rejection sampling removes modulo bias.
    inline std::uint64_t uniform_index(Rng &rng, std::uint64_t n)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do
        {
            x = rng();
        } while (x >= limit);
        return x % n;
    }
}

#endif
