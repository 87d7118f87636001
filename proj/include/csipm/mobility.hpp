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

#ifndef CSIPM_MOBILITY_HPP
#define CSIPM_MOBILITY_HPP

#include "csipm/channel.hpp"
#include "csipm/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace csipm
{
    // Birth-death chain over 2S+1 equidistant accelerations in [-a_max, a_max].
    struct FsmcConfig
    {
        int s = 2;
        double a_max = 1.0; // m/s^2
        double p = 0.2;     // probability of moving to each neighbour

        int num_states() const { return 2 * s + 1; }
        double state_value(int index) const { return -a_max + index * (a_max / s); }
        // Row-stochastic transition matrix, row = current state.
        std::vector<std::vector<double>> transition_matrix() const;
        void validate() const;
    };

    struct MobilityConfig
    {
        double v_min_mps = 30.0 / 3.6;
        double v_max_mps = 50.0 / 3.6;
        double delta_tau_s = 0.1; // CAM period
        int direction = +1;       // +1 drives towards increasing y

        void validate() const;
    };

    struct VehicleState
    {
        std::uint64_t vehicle_id = 0;
        std::int64_t tick = 0; // t_s == tick * delta_tau_s
        double t_s = 0.0;
        double longitudinal_m = 0.0; // scene y
        double lateral_m = 0.0;      // scene x, fixed grid column
        double speed_mps = 0.0;
        int accel_state = 0;
    };

    using Trace = std::vector<VehicleState>;

    // Starts at the street end matching mobility.direction, in a random grid
    // column, with uniform speed and uniform FSMC state (drawn in that order).
    VehicleState init_vehicle(const Scene &scene, const MobilityConfig &mobility, const FsmcConfig &fsmc,
                              Rng &rng, std::uint64_t vehicle_id = 0);

    int fsmc_step(int state_index, const FsmcConfig &fsmc, Rng &rng);

    // One CAM period of constant-acceleration motion followed by the FSMC
    // transition. Speed is clamped to [v_min, v_max]; the FSMC state is not
    // touched by the clamp. Returns nullopt once the vehicle leaves the street.
    std::optional<VehicleState> kinematic_update(const VehicleState &v, const Scene &scene,
                                                 const MobilityConfig &mobility, const FsmcConfig &fsmc, Rng &rng);

    // At most max_steps states, starting with init_vehicle.
    Trace simulate_trace(const Scene &scene, const MobilityConfig &mobility, const FsmcConfig &fsmc,
                         Rng &rng, std::size_t max_steps, std::uint64_t vehicle_id = 0);
}

#endif
