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

#ifndef CSIPM_CHANNEL_HPP
#define CSIPM_CHANNEL_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace csipm
{
    using Complex = std::complex<double>;
    using ChannelVector = std::vector<Complex>;

    inline constexpr double speed_of_light = 299792458.0;
    inline constexpr double pi = 3.14159265358979323846;
    inline constexpr double two_pi = 2.0 * pi;

    struct Vec3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;
    };

    // Uniform array at the gNB. Elements are flattened x-major:
    // index = (ix * m_y + iy) * m_z + iz.
    struct ArrayGeometry
    {
        int m_x = 4;
        int m_y = 4;
        int m_z = 1;
        double spacing_over_lambda = 0.5;

        int size() const { return m_x * m_y * m_z; }
        void validate() const;
    };

    struct ChannelConfig
    {
        double carrier_hz = 28e9;
        double bandwidth_hz = 100e6;
        int num_subcarriers = 240;
        int max_paths = 5;

        double wavelength_m() const { return speed_of_light / carrier_hz; }
        void validate() const;
    };

    // One propagation path. Angles describe the direction of the first segment
    // leaving the gNB: elevation is polar (from +z), azimuth from +x in the xy-plane.
    struct PathComponent
    {
        double gain = 0.0;    // linear power
        double delay_s = 0.0;
        double phase_rad = 0.0;
        double azimuth_rad = 0.0;
        double elevation_rad = 0.0;
    };

    // Street canyon: x across the street (walls at x = 0 and x = width), y along
    // the street, z up with the ground plane at z = 0.
    struct Scene
    {
        double street_length_m = 550.2;
        double street_width_m = 36.0;
        double grid_step_m = 0.2;
        Vec3 gnb_position_m{2.0, 275.0, 6.0};
        double wall_reflectivity = 0.7;
        double antenna_height_m = 1.5;

        int num_rows() const;
        int num_cols() const;
        int nearest_row(double y_m) const;
        int nearest_col(double x_m) const;
        int gnb_row() const { return nearest_row(gnb_position_m.y); }
        // Vehicle antenna position at a grid point.
        Vec3 grid_point(int row, int col) const;
        void validate() const;
    };

    // M x K complex gains, column-major so each subcarrier is contiguous.
    class ChannelMatrix
    {
    public:
        ChannelMatrix() = default;
        ChannelMatrix(int num_antennas, int num_subcarriers)
            : antennas_(num_antennas), subcarriers_(num_subcarriers),
              entries_(static_cast<std::size_t>(num_antennas) * num_subcarriers) {}

        int num_antennas() const { return antennas_; }
        int num_subcarriers() const { return subcarriers_; }

        Complex &operator()(int m, int k) { return entries_[index(m, k)]; }
        const Complex &operator()(int m, int k) const { return entries_[index(m, k)]; }

        std::span<Complex> column(int k) { return {entries_.data() + index(0, k), static_cast<std::size_t>(antennas_)}; }
        std::span<const Complex> column(int k) const { return {entries_.data() + index(0, k), static_cast<std::size_t>(antennas_)}; }
        const std::vector<Complex> &entries() const { return entries_; }

    private:
        std::size_t index(int m, int k) const { return static_cast<std::size_t>(k) * antennas_ + m; }

        int antennas_ = 0;
        int subcarriers_ = 0;
        std::vector<Complex> entries_;
    };

    // a = a_x (x) a_y (x) a_z with a_x[m] = exp(j*kappa*m*sin(el)*cos(az)),
    // a_y[m] = exp(j*kappa*m*sin(el)*sin(az)), a_z[m] = exp(j*kappa*m*cos(el)),
    // kappa = 2*pi*spacing_over_lambda.
    ChannelVector array_response(double azimuth_rad, double elevation_rad, const ArrayGeometry &geometry);

    // Image-method street canyon: LOS, ground bounce, one bounce off each wall,
    // and ground + near-wall double bounce. Sorted by descending gain and
    // truncated to config.max_paths. Throws PositionOutOfScene.
    std::vector<PathComponent> trace_paths(const Scene &scene, const Vec3 &rx_position_m, const ChannelConfig &config);

    // Ray-sum channel vector at subcarrier k. Throws SubcarrierOutOfRange.
    ChannelVector channel_at_subcarrier(std::span<const PathComponent> paths, int k,
                                        const ArrayGeometry &geometry, const ChannelConfig &config);

    // All K subcarriers; columns are evaluated in parallel.
    ChannelMatrix channel_matrix(std::span<const PathComponent> paths,
                                 const ArrayGeometry &geometry, const ChannelConfig &config);
}

#endif
