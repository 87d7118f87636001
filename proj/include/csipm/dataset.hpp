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

#ifndef CSIPM_DATASET_HPP
#define CSIPM_DATASET_HPP

#include "csipm/channel.hpp"
#include "csipm/mobility.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace csipm
{
    // Overheard cooperative awareness message content.
    struct CamRecord
    {
        std::uint64_t vehicle_id = 0;
        double t_s = 0.0;
        double x_m = 0.0; // lateral
        double y_m = 0.0; // longitudinal
        double speed_mps = 0.0;
        double accel_mps2 = 0.0;
    };

    struct CsiRecord
    {
        std::uint64_t vehicle_id = 0;
        double t_s = 0.0;
        ChannelVector csi;
    };

    struct Streams
    {
        std::vector<CamRecord> cam;
        std::vector<CsiRecord> csi;
    };

    // One auto-labelled row. CSI is flattened as M real parts then M imaginary parts.
    struct DatasetInstance
    {
        std::uint64_t vehicle_id = 0;
        double t_s = 0.0;
        double x_m = 0.0;
        double y_m = 0.0;
        double speed_mps = 0.0;
        double accel_mps2 = 0.0;
        std::vector<double> csi_now;
        std::vector<double> label_next; // csi_now of the same vehicle one CAM period later

        bool operator==(const DatasetInstance &) const = default;
    };

    // Instances sorted by (vehicle_id, t_s).
    struct Dataset
    {
        int num_antennas = 0;
        double delta_tau_s = 0.1;
        std::vector<DatasetInstance> instances;

        std::size_t size() const { return instances.size(); }
        bool operator==(const Dataset &) const = default;
    };

    struct LabelResult
    {
        std::vector<DatasetInstance> instances;
        std::size_t unmatched_cam = 0;
        std::size_t unmatched_csi = 0;
    };

    struct DatasetConfig
    {
        int ref_subcarrier = 0;
        int max_row_distance = 250;
        std::size_t target_instances = 8860;
        bool both_directions = true;
        std::size_t max_vehicles = 1000000;
        int window = 10;
        double train_fraction = 0.7;
    };

    // Everything the simulated gNB needs to produce a dataset.
    struct SimulationSetup
    {
        Scene scene;
        ArrayGeometry geometry;
        ChannelConfig channel;
        MobilityConfig mobility;
        FsmcConfig fsmc;
    };

    std::vector<double> flatten_csi(std::span<const Complex> csi);
    ChannelVector unflatten_csi(std::span<const double> flat);

    // One CAM and one CSI record per vehicle per tick, with CSI taken at the
    // grid point nearest to the vehicle. Vehicles are processed in parallel;
    // output order follows the trace order.
    Streams collect_streams(std::span<const Trace> traces, const SimulationSetup &setup, int ref_subcarrier);

    namespace detail
    {
        // CAM and CSI records of one trace, appended in tick order.
        void collect_trace(const Trace &trace, const SimulationSetup &setup, int ref_subcarrier,
                           std::vector<CamRecord> &cam, std::vector<CsiRecord> &csi);
    }

    // Joins the streams on (vehicle_id, t) within delta_tau/10 and labels each
    // joined row with the CSI one period later. Both inputs sorted by (vehicle_id, t).
    LabelResult align_and_label(std::span<const CamRecord> cam, std::span<const CsiRecord> csi, double delta_tau_s);

    // The full trace of one vehicle as build_dataset simulates it. With
    // both_directions the travel direction is the vehicle's first draw.
    Trace vehicle_trace(const SimulationSetup &setup, const DatasetConfig &config, std::uint64_t master_seed,
                        std::uint64_t vehicle_id);

    // Simulates vehicles in id order, keeping instances within max_row_distance
    // grid rows of the gNB row, until at least target_instances are collected.
    Dataset build_dataset(const SimulationSetup &setup, const DatasetConfig &config, std::uint64_t master_seed);

    // Whole-vehicle split. Vehicles are shuffled under seed and moved to the
    // training side until it holds at least floor(fraction * N) instances.
    std::pair<Dataset, Dataset> split(const Dataset &dataset, double train_fraction, std::uint64_t seed);

    // Text format: header "csi-dataset v1 M=<int> dt=<float>", then one
    // comma-separated line per instance:
    // vehicle_id,t,pos_x,pos_y,speed,accel,<2M csi>,<2M label>.
    void serialize_dataset(const Dataset &dataset, const std::filesystem::path &path);
    Dataset deserialize_dataset(const std::filesystem::path &path);

    // Header "csi-trace v1 dt=<float>", then vehicle_id,tick,t,pos_x,pos_y,speed,accel_state.
    void serialize_traces(std::span<const Trace> traces, double delta_tau_s, const std::filesystem::path &path);
    std::vector<Trace> deserialize_traces(const std::filesystem::path &path);
}

#endif
