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

#ifndef NRMU_SCHEDULER_HPP
#define NRMU_SCHEDULER_HPP

#include "nrmu/csi.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nrmu
{

enum class AllocationMode
{
    SingleUser,
    MuMimo
};

struct ScheduledUe
{
    int ue_id = 0;
    double alpha = 1.0; // amplitude power coefficient
    int pmi = 0;
};

// One PDSCH grant. In MuMimo mode both UEs share the RB range and MCS.
struct Allocation
{
    std::vector<ScheduledUe> ues;
    int start_rb = 0;
    int num_rb = 0;
    int mcs_index = 0;
    AllocationMode mode = AllocationMode::SingleUser;
    bool retransmission = false;
};

// Proportional-fair and HARQ state of one UE, owned by the scheduler loop.
struct UeSchedState
{
    int ue_id = 0;
    double avg_rate = 0.0;         // bits per slot, exponentially averaged
    bool pending_retx = false;
    int harq_attempts = 0;         // transmissions of the TB currently in flight
    int retx_mcs = 0;              // MCS of the TB awaiting retransmission
    CsiReport last_report{};
    double reported_sinr_db = 0.0; // single-user post-precoding SINR behind last_report
    std::int64_t buffered_bytes = 0;
    std::int64_t last_served_slot = -1;
};

struct SchedulerConfig
{
    double pf_beta = 0.05;
    double avg_rate_floor = 1e-6;
    int max_harq_attempts = 4;
    bool mu_mimo_enabled = true;
    std::optional<int> forced_mcs; // bypasses CQI when set
};

UeSchedState make_ue_state(int ue_id, const SchedulerConfig& cfg);

// First (ue_a, ue_b) in ue_id order whose PMIs are orthogonal, both with data
// and neither waiting for a retransmission.
std::optional<std::pair<int, int>> try_mu_pairing(std::span<const UeSchedState> states);

// Whole-band grant to the UE with the best instantaneous / average rate.
// Pending retransmissions are served first. Returns no allocation when no UE
// has data.
std::vector<Allocation> pf_schedule(std::span<const UeSchedState> states, int total_rb,
                                    const SchedulerConfig& cfg);

// MU-MIMO grant when a pair exists (UE_2 inherits UE_1's MCS, equal power),
// otherwise pf_schedule.
std::vector<Allocation> schedule_slot(std::span<const UeSchedState> states, int total_rb,
                                      const SchedulerConfig& cfg);

// Exponential average update, clamped at the configured floor.
void update_average(UeSchedState& state, double delivered_bits, const SchedulerConfig& cfg);

// ACK clears the HARQ process. NACK marks a retransmission until
// max_harq_attempts transmissions have failed, then the TB is dropped.
UeSchedState on_harq_feedback(UeSchedState state, bool ack, std::int64_t delivered_bits,
                              const SchedulerConfig& cfg);

} // namespace nrmu

#endif
