// SPDX-License-Identifier: Apache-2.0
//
// nrmu: link-level simulator for two-user MU-MIMO on the 5G NR PDSCH
// Copyright (C) 2026 The nrmu Authors
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

#ifndef NRMU_SIM_HPP
#define NRMU_SIM_HPP

#include "nrmu/channel.hpp"
#include "nrmu/phy.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace nrmu
{

enum class ChannelMode
{
    Ideal,
    Rayleigh,
    Forced
};

enum class SchedulerMode
{
    MuMimoEnabled,
    ProportionalFairOnly,
    SingleUserOnly
};

std::string_view to_string(SchedulerMode mode);
std::string_view to_string(ChannelMode mode);

struct SimConfig
{
    int num_rb = 106;
    int scs_khz = 30;
    ChannelMode channel_mode = ChannelMode::Ideal;
    ChannelVector forced_h1{{Complex{1.0, 0.0}, Complex{0.0, 1.0}}, 0};
    ChannelVector forced_h2{{Complex{1.0, 0.0}, Complex{0.0, -1.0}}, 1};
    std::vector<double> snr_grid_db = default_snr_grid();
    std::vector<int> mcs_list = default_mcs_list();
    SchedulerMode scheduler_mode = SchedulerMode::MuMimoEnabled;
    int tb_per_point = 200; // new transport blocks per UE per grid point
    std::uint64_t seed = 1;
    double epsilon = 0.5;
    int data_re_per_rb = kDefaultDataRePerRb;
    LinkModel link_model = LinkModel::BoundedDistance;
    double threshold_margin_db = 3.0;
    int drop_slots = 100;    // slots per channel drop / CSI report
    int csirs_pilots = 0;    // 0 selects 2 * num_rb
    int max_harq_attempts = 4;
    int workers = 1;         // 0 selects the hardware concurrency

    // 1 ms / 2^mu, mu = log2(scs_khz / 15)
    double slot_duration_s() const;
    int pilot_count() const { return csirs_pilots > 0 ? csirs_pilots : 2 * num_rb; }

    static std::vector<double> default_snr_grid();
    static std::vector<int> default_mcs_list();
};

// Throws std::invalid_argument naming the offending field.
void validate(const SimConfig& cfg);

struct UeMetrics
{
    int ue_id = 0;
    std::int64_t blocks_attempted = 0; // every transmission, HARQ rounds included
    std::int64_t block_errors = 0;
    std::int64_t bits_acked = 0;
    std::int64_t new_blocks = 0;

    double bler() const
    {
        return blocks_attempted > 0 ? static_cast<double>(block_errors) / blocks_attempted : 0.0;
    }
};

struct PointMetrics
{
    double snr_db = 0.0;
    int mcs_index = 0;
    std::vector<UeMetrics> ues;
    std::int64_t slots_elapsed = 0;
    std::int64_t rb_slots_used = 0;
    std::int64_t bits_delivered = 0;
    std::int64_t mu_slots = 0;
    std::int64_t retx_slots = 0;
    std::int64_t pf_new_data_slots = 0; // single-user slots carrying a new TB
    double throughput_bps = 0.0;

    double bler_max() const;
    double bler_avg() const;
    double ue_throughput_bps(std::size_t k, double slot_duration_s) const;
};

struct RunMetrics
{
    SchedulerMode mode = SchedulerMode::MuMimoEnabled;
    std::vector<double> snr_grid_db;
    std::vector<int> mcs_list;
    std::vector<PointMetrics> points; // snr-major

    const PointMetrics& at(std::size_t snr_idx, std::size_t mcs_idx) const
    {
        return points.at(snr_idx * mcs_list.size() + mcs_idx);
    }
};

// Throws std::domain_error for slots_elapsed < 1.
double throughput_from_counters(std::int64_t bits_acked, std::int64_t slots_elapsed,
                                double slot_duration_s);

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t snr_idx, std::size_t mcs_idx);

// One (SNR, MCS) grid point: per slot CSI -> scheduler -> PHY -> HARQ until
// every UE has sent tb_per_point new transport blocks and finished their HARQ
// rounds.
PointMetrics run_point(const SimConfig& cfg, double snr_db, int mcs_index, std::uint64_t seed);

// Cartesian sweep; points run on cfg.workers threads and are merged by index.
RunMetrics run_sweep(const SimConfig& cfg);

// Highest total throughput over MCS per SNR among points whose worst-UE BLER
// is below bler_target (0 when no MCS qualifies).
std::vector<double> achievable_rate_envelope(const RunMetrics& run, double bler_target);

} // namespace nrmu

#endif
