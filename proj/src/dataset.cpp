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
#include "csipm/error.hpp"
#include "csipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

#include <omp.h>

namespace csipm
{
    std::vector<double> flatten_csi(std::span<const Complex> csi)
    {
        std::vector<double> flat(2 * csi.size());
        for (std::size_t m = 0; m < csi.size(); ++m)
        {
            flat[m] = csi[m].real();
            flat[csi.size() + m] = csi[m].imag();
        }
        return flat;
    }

    ChannelVector unflatten_csi(std::span<const double> flat)
    {
        if (flat.size() % 2 != 0)
            throw ShapeMismatch("flattened CSI must have even length");
        const std::size_t m_count = flat.size() / 2;
        ChannelVector csi(m_count);
        for (std::size_t m = 0; m < m_count; ++m)
            csi[m] = {flat[m], flat[m_count + m]};
        return csi;
    }

    namespace detail
    {
        void collect_trace(const Trace &trace, const SimulationSetup &setup, int ref_subcarrier,
                           std::vector<CamRecord> &cam, std::vector<CsiRecord> &csi)
        {
            const Scene &scene = setup.scene;
            for (const VehicleState &v : trace)
            {
                cam.push_back({v.vehicle_id, v.t_s, v.lateral_m, v.longitudinal_m, v.speed_mps,
                               setup.fsmc.state_value(v.accel_state)});
                const Vec3 rx = scene.grid_point(scene.nearest_row(v.longitudinal_m), scene.nearest_col(v.lateral_m));
                const auto paths = trace_paths(scene, rx, setup.channel);
                csi.push_back({v.vehicle_id, v.t_s, channel_at_subcarrier(paths, ref_subcarrier, setup.geometry, setup.channel)});
            }
        }
    }

    Streams collect_streams(std::span<const Trace> traces, const SimulationSetup &setup, int ref_subcarrier)
    {
        if (ref_subcarrier < 0 || ref_subcarrier >= setup.channel.num_subcarriers)
            throw SubcarrierOutOfRange("reference subcarrier " + std::to_string(ref_subcarrier) + " out of range");

        const auto n = static_cast<std::ptrdiff_t>(traces.size());
        std::vector<Streams> per_trace(traces.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            detail::collect_trace(traces[i], setup, ref_subcarrier, per_trace[i].cam, per_trace[i].csi);

        Streams out;
        for (Streams &s : per_trace)
        {
            std::move(s.cam.begin(), s.cam.end(), std::back_inserter(out.cam));
            std::move(s.csi.begin(), s.csi.end(), std::back_inserter(out.csi));
        }
        return out;
    }

    LabelResult align_and_label(std::span<const CamRecord> cam, std::span<const CsiRecord> csi, double delta_tau_s)
    {
        const double tol = delta_tau_s / 10.0;
        LabelResult result;

        std::vector<std::pair<std::size_t, std::size_t>> joined;
        std::size_t i = 0, j = 0;
        while (i < cam.size() && j < csi.size())
        {
            const CamRecord &a = cam[i];
            const CsiRecord &b = csi[j];
            if (a.vehicle_id < b.vehicle_id)
                ++result.unmatched_cam, ++i;
            else if (a.vehicle_id > b.vehicle_id)
                ++result.unmatched_csi, ++j;
            else if (std::abs(a.t_s - b.t_s) <= tol)
                joined.emplace_back(i++, j++);
            else if (a.t_s < b.t_s)
                ++result.unmatched_cam, ++i;
            else
                ++result.unmatched_csi, ++j;
        }
        result.unmatched_cam += cam.size() - i;
        result.unmatched_csi += csi.size() - j;

        for (std::size_t r = 0; r + 1 < joined.size(); ++r)
        {
            const CamRecord &now = cam[joined[r].first];
            const CamRecord &next = cam[joined[r + 1].first];
            if (next.vehicle_id != now.vehicle_id || std::abs(next.t_s - (now.t_s + delta_tau_s)) > tol)
                continue;
            DatasetInstance inst;
            inst.vehicle_id = now.vehicle_id;
            inst.t_s = now.t_s;
            inst.x_m = now.x_m;
            inst.y_m = now.y_m;
            inst.speed_mps = now.speed_mps;
            inst.accel_mps2 = now.accel_mps2;
            inst.csi_now = flatten_csi(csi[joined[r].second].csi);
            inst.label_next = flatten_csi(csi[joined[r + 1].second].csi);
            result.instances.push_back(std::move(inst));
        }
        return result;
    }

    Trace vehicle_trace(const SimulationSetup &setup, const DatasetConfig &config, std::uint64_t master_seed,
                        std::uint64_t vehicle_id)
    {
        Rng rng(derive_seed(master_seed, stream::vehicle, vehicle_id));
        MobilityConfig mobility = setup.mobility;
        if (config.both_directions)
            mobility.direction = uniform01(rng) < 0.5 ? +1 : -1;
        return simulate_trace(setup.scene, mobility, setup.fsmc, rng, std::numeric_limits<std::size_t>::max(),
                              vehicle_id);
    }

    namespace
    {
        std::vector<DatasetInstance> simulate_vehicle(const SimulationSetup &setup, const DatasetConfig &config,
                                                      std::uint64_t master_seed, std::uint64_t vehicle_id)
        {
            const Trace trace = vehicle_trace(setup, config, master_seed, vehicle_id);
            std::vector<CamRecord> cam;
            std::vector<CsiRecord> csi;
            detail::collect_trace(trace, setup, config.ref_subcarrier, cam, csi);
            LabelResult labelled = align_and_label(cam, csi, setup.mobility.delta_tau_s);

            const int gnb_row = setup.scene.gnb_row();
            std::vector<DatasetInstance> kept;
            for (DatasetInstance &inst : labelled.instances)
                if (std::abs(setup.scene.nearest_row(inst.y_m) - gnb_row) <= config.max_row_distance)
                    kept.push_back(std::move(inst));
            return kept;
        }
    }

    Dataset build_dataset(const SimulationSetup &setup, const DatasetConfig &config, std::uint64_t master_seed)
    {
        setup.scene.validate();
        setup.geometry.validate();
        setup.channel.validate();
        setup.mobility.validate();
        setup.fsmc.validate();
        if (config.max_row_distance < 0)
            throw InvalidConfig("dataset: max_row_distance must be >= 0");
        if (config.ref_subcarrier < 0 || config.ref_subcarrier >= setup.channel.num_subcarriers)
            throw SubcarrierOutOfRange("reference subcarrier out of range");

        Dataset ds;
        ds.num_antennas = setup.geometry.size();
        ds.delta_tau_s = setup.mobility.delta_tau_s;

        const std::uint64_t chunk = 4 * static_cast<std::uint64_t>(omp_get_max_threads());
        std::uint64_t next_id = 0;
        while (ds.instances.size() < config.target_instances)
        {
            if (next_id >= config.max_vehicles)
                throw Error("dataset: target of " + std::to_string(config.target_instances) +
                            " instances not reached after " + std::to_string(next_id) + " vehicles");
            std::vector<std::vector<DatasetInstance>> batch(chunk);
            const auto n = static_cast<std::ptrdiff_t>(chunk);
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t b = 0; b < n; ++b)
                batch[b] = simulate_vehicle(setup, config, master_seed, next_id + static_cast<std::uint64_t>(b));

            for (auto &vehicle : batch)
            {
                if (ds.instances.size() >= config.target_instances)
                    break;
                std::move(vehicle.begin(), vehicle.end(), std::back_inserter(ds.instances));
            }
            next_id += chunk;
        }
        return ds;
    }

    std::pair<Dataset, Dataset> split(const Dataset &dataset, double train_fraction, std::uint64_t seed)
    {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw InvalidConfig("split: train fraction must lie in (0, 1)");

        std::map<std::uint64_t, std::size_t> counts;
        for (const DatasetInstance &inst : dataset.instances)
            ++counts[inst.vehicle_id];
        std::vector<std::uint64_t> ids;
        ids.reserve(counts.size());
        for (const auto &[id, count] : counts)
            ids.push_back(id);

        Rng rng(seed);
        for (std::size_t i = ids.size(); i > 1; --i)
            std::swap(ids[i - 1], ids[uniform_index(rng, i)]);

        const auto target = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(dataset.size())));
        std::map<std::uint64_t, bool> in_train;
        std::size_t train_count = 0;
        for (std::uint64_t id : ids)
        {
            const bool take = train_count < target;
            in_train[id] = take;
            if (take)
                train_count += counts[id];
        }

        std::pair<Dataset, Dataset> parts;
        for (Dataset *d : {&parts.first, &parts.second})
        {
            d->num_antennas = dataset.num_antennas;
            d->delta_tau_s = dataset.delta_tau_s;
        }
        for (const DatasetInstance &inst : dataset.instances)
            (in_train[inst.vehicle_id] ? parts.first : parts.second).instances.push_back(inst);
        return parts;
    }
}
