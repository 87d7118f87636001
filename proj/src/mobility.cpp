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

#include "csipm/mobility.hpp"
#include "csipm/error.hpp"

#include <algorithm>

namespace csipm
{
    std::vector<std::vector<double>> FsmcConfig::transition_matrix() const
    {
        const int n = num_states();
        std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
        {
            if (i > 0)
                P[i][i - 1] = p;
            if (i < n - 1)
                P[i][i + 1] = p;
            P[i][i] = (i == 0 || i == n - 1) ? 1.0 - p : 1.0 - 2.0 * p;
        }
        return P;
    }

    void FsmcConfig::validate() const
    {
        if (s < 1)
            throw InvalidConfig("fsmc: s must be >= 1");
        if (!(a_max >= 0.0))
            throw InvalidConfig("fsmc: a_max must be >= 0");
        if (!(p > 0.0 && p <= 0.5))
            throw InvalidConfig("fsmc: p must lie in (0, 0.5]");
    }

    void MobilityConfig::validate() const
    {
        if (!(v_min_mps > 0.0 && v_min_mps <= v_max_mps))
            throw InvalidConfig("mobility: need 0 < v_min <= v_max");
        if (!(delta_tau_s > 0.0))
            throw InvalidConfig("mobility: delta_tau_s must be > 0");
        if (direction != 1 && direction != -1)
            throw InvalidConfig("mobility: direction must be +1 or -1");
    }

    VehicleState init_vehicle(const Scene &scene, const MobilityConfig &mobility, const FsmcConfig &fsmc,
                              Rng &rng, std::uint64_t vehicle_id)
    {
        VehicleState v;
        v.vehicle_id = vehicle_id;
        v.longitudinal_m = mobility.direction > 0 ? 0.0 : scene.street_length_m;
        const auto col = uniform_index(rng, static_cast<std::uint64_t>(scene.num_cols()));
        v.lateral_m = static_cast<double>(col) * scene.grid_step_m;
        v.speed_mps = mobility.v_min_mps == mobility.v_max_mps
                          ? mobility.v_min_mps
                          : uniform_real(rng, mobility.v_min_mps, mobility.v_max_mps);
        v.accel_state = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(fsmc.num_states())));
        return v;
    }

    int fsmc_step(int state_index, const FsmcConfig &fsmc, Rng &rng)
    {
        const int last = fsmc.num_states() - 1;
        const double u = uniform01(rng);
        if (state_index == 0)
            return u < fsmc.p ? 1 : 0;
        if (state_index == last)
            return u < fsmc.p ? last - 1 : last;
        if (u < fsmc.p)
            return state_index - 1;
        if (u < 2.0 * fsmc.p)
            return state_index + 1;
        return state_index;
    }

    std::optional<VehicleState> kinematic_update(const VehicleState &v, const Scene &scene,
                                                 const MobilityConfig &mobility, const FsmcConfig &fsmc, Rng &rng)
    {
        const double dt = mobility.delta_tau_s;
        const double a = fsmc.state_value(v.accel_state);

        VehicleState next = v;
        next.longitudinal_m += mobility.direction * (v.speed_mps * dt + 0.5 * a * dt * dt);
        next.speed_mps = std::clamp(v.speed_mps + a * dt, mobility.v_min_mps, mobility.v_max_mps);
        next.tick = v.tick + 1;
        next.t_s = static_cast<double>(next.tick) * dt;
        next.accel_state = fsmc_step(v.accel_state, fsmc, rng);

        if (next.longitudinal_m < 0.0 || next.longitudinal_m > scene.street_length_m)
            return std::nullopt;
        return next;
    }

    Trace simulate_trace(const Scene &scene, const MobilityConfig &mobility, const FsmcConfig &fsmc,
                         Rng &rng, std::size_t max_steps, std::uint64_t vehicle_id)
    {
        Trace trace;
        if (max_steps == 0)
            return trace;
        trace.push_back(init_vehicle(scene, mobility, fsmc, rng, vehicle_id));
        while (trace.size() < max_steps)
        {
            auto next = kinematic_update(trace.back(), scene, mobility, fsmc, rng);
            if (!next)
                break;
            trace.push_back(*next);
        }
        return trace;
    }
}
