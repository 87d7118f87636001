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

#include "csipm/channel.hpp"
#include "csipm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csipm
{
    void ArrayGeometry::validate() const
    {
        if (m_x < 1 || m_y < 1 || m_z < 1)
            throw InvalidConfig("array: element counts must be >= 1");
        if (!(spacing_over_lambda > 0.0))
            throw InvalidConfig("array: spacing_over_lambda must be > 0");
    }

    void ChannelConfig::validate() const
    {
        if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0))
            throw InvalidConfig("channel: carrier and bandwidth must be > 0");
        if (num_subcarriers < 1 || max_paths < 1)
            throw InvalidConfig("channel: num_subcarriers and max_paths must be >= 1");
    }

    int Scene::num_rows() const
    {
        return static_cast<int>(std::lround(street_length_m / grid_step_m)) + 1;
    }

    int Scene::num_cols() const
    {
        return static_cast<int>(std::lround(street_width_m / grid_step_m)) + 1;
    }

    int Scene::nearest_row(double y_m) const
    {
        return static_cast<int>(std::clamp<long>(std::lround(y_m / grid_step_m), 0, num_rows() - 1));
    }

    int Scene::nearest_col(double x_m) const
    {
        return static_cast<int>(std::clamp<long>(std::lround(x_m / grid_step_m), 0, num_cols() - 1));
    }

    Vec3 Scene::grid_point(int row, int col) const
    {
        return {col * grid_step_m, row * grid_step_m, antenna_height_m};
    }

    void Scene::validate() const
    {
        if (!(street_length_m > 0.0) || !(street_width_m > 0.0) || !(grid_step_m > 0.0))
            throw InvalidConfig("scene: extents and grid step must be > 0");
        if (!(wall_reflectivity >= 0.0 && wall_reflectivity <= 1.0))
            throw InvalidConfig("scene: wall_reflectivity must lie in [0, 1]");
        if (!(antenna_height_m > 0.0) || !(gnb_position_m.z > 0.0))
            throw InvalidConfig("scene: antenna heights must be > 0");
        if (gnb_position_m.x < 0.0 || gnb_position_m.x > street_width_m ||
            gnb_position_m.y < 0.0 || gnb_position_m.y > street_length_m)
            throw InvalidConfig("scene: gNB must stand inside the street");
    }

    ChannelVector array_response(double azimuth_rad, double elevation_rad, const ArrayGeometry &geometry)
    {
        const double kappa = two_pi * geometry.spacing_over_lambda;
        const double ux = std::sin(elevation_rad) * std::cos(azimuth_rad);
        const double uy = std::sin(elevation_rad) * std::sin(azimuth_rad);
        const double uz = std::cos(elevation_rad);

        auto axis = [kappa](int count, double u)
        {
            std::vector<Complex> a(static_cast<std::size_t>(count));
            for (int m = 0; m < count; ++m)
                a[m] = std::polar(1.0, kappa * m * u);
            return a;
        };
        const auto ax = axis(geometry.m_x, ux);
        const auto ay = axis(geometry.m_y, uy);
        const auto az = axis(geometry.m_z, uz);

        ChannelVector a;
        a.reserve(static_cast<std::size_t>(geometry.size()));
        for (const Complex &x : ax)
            for (const Complex &y : ay)
                for (const Complex &z : az)
                    a.push_back(x * y * z);
        return a;
    }

    namespace
    {
        struct Image
        {
            Vec3 source;
            bool flip_x;
            bool flip_z;
            int bounces;
        };

        constexpr double min_path_length_m = 1.0;
    }

    std::vector<PathComponent> trace_paths(const Scene &scene, const Vec3 &rx, const ChannelConfig &config)
    {
        constexpr double tol = 1e-9;
        if (rx.x < -tol || rx.x > scene.street_width_m + tol ||
            rx.y < -tol || rx.y > scene.street_length_m + tol || rx.z < 0.0)
            throw PositionOutOfScene("receiver (" + std::to_string(rx.x) + ", " + std::to_string(rx.y) + ", " +
                                     std::to_string(rx.z) + ") lies outside the street");

        const Vec3 &g = scene.gnb_position_m;
        const double w = scene.street_width_m;
        const double near_wall_x = g.x <= 0.5 * w ? -g.x : 2.0 * w - g.x;

        const Image images[] = {
            {{g.x, g.y, g.z}, false, false, 0},
            {{g.x, g.y, -g.z}, false, true, 1},
            {{-g.x, g.y, g.z}, true, false, 1},
            {{2.0 * w - g.x, g.y, g.z}, true, false, 1},
            {{near_wall_x, g.y, -g.z}, true, true, 2},
        };

        const double lambda = config.wavelength_m();
        const double r2 = scene.wall_reflectivity * scene.wall_reflectivity;

        std::vector<PathComponent> paths;
        paths.reserve(std::size(images));
        for (const Image &im : images)
        {
            const double dx = rx.x - im.source.x;
            const double dy = rx.y - im.source.y;
            const double dz = rx.z - im.source.z;
            const double unfolded = std::sqrt(dx * dx + dy * dy + dz * dz);
            const double length = std::max(unfolded, min_path_length_m);

            PathComponent p;
            const double free_space = lambda / (4.0 * pi * length);
            p.gain = free_space * free_space * std::pow(r2, im.bounces);
            p.delay_s = length / speed_of_light;
            double phase = std::fmod(-two_pi * config.carrier_hz * p.delay_s, two_pi);
            if (phase < 0.0)
                phase += two_pi;
            p.phase_rad = phase < two_pi ? phase : 0.0;

            // Mirroring the unfolded direction back through each plane yields
            // the first segment leaving the real gNB.
            if (unfolded > 0.0)
            {
                const double ux = im.flip_x ? -dx : dx;
                const double uz = im.flip_z ? -dz : dz;
                p.azimuth_rad = std::atan2(dy, ux);
                p.elevation_rad = std::acos(std::clamp(uz / unfolded, -1.0, 1.0));
            }
            paths.push_back(p);
        }

        std::stable_sort(paths.begin(), paths.end(),
                         [](const PathComponent &a, const PathComponent &b)
                         { return a.gain > b.gain; });
        if (paths.size() > static_cast<std::size_t>(config.max_paths))
            paths.resize(static_cast<std::size_t>(config.max_paths));
        return paths;
    }

    ChannelVector channel_at_subcarrier(std::span<const PathComponent> paths, int k,
                                        const ArrayGeometry &geometry, const ChannelConfig &config)
    {
        if (k < 0 || k >= config.num_subcarriers)
            throw SubcarrierOutOfRange("subcarrier " + std::to_string(k) + " outside [0, " +
                                       std::to_string(config.num_subcarriers) + ")");

        const double K = config.num_subcarriers;
        ChannelVector h(static_cast<std::size_t>(geometry.size()), Complex{0.0, 0.0});
        for (const PathComponent &p : paths)
        {
            const double phase = p.phase_rad + two_pi * k * p.delay_s * config.bandwidth_hz / K;
            const Complex coefficient = std::polar(std::sqrt(p.gain / K), phase);
            const ChannelVector a = array_response(p.azimuth_rad, p.elevation_rad, geometry);
            for (std::size_t m = 0; m < h.size(); ++m)
                h[m] += coefficient * a[m];
        }
        return h;
    }

    ChannelMatrix channel_matrix(std::span<const PathComponent> paths,
                                 const ArrayGeometry &geometry, const ChannelConfig &config)
    {
        ChannelMatrix H(geometry.size(), config.num_subcarriers);
#pragma omp parallel for schedule(static)
        for (int k = 0; k < config.num_subcarriers; ++k)
        {
            const ChannelVector h = channel_at_subcarrier(paths, k, geometry, config);
            std::copy(h.begin(), h.end(), H.column(k).begin());
        }
        return H;
    }
}
