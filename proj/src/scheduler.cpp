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

#include "nrmu/scheduler.hpp"

#include "nrmu/codebook.hpp"
#include "nrmu/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrmu
{

namespace
{

bool has_data(const UeSchedState& s)
{
    return s.buffered_bytes > 0 || s.pending_retx;
}

int pick_mcs(const UeSchedState& s, const SchedulerConfig& cfg)
{
    if (s.pending_retx)
        return s.retx_mcs;
    if (cfg.forced_mcs)
        return *cfg.forced_mcs;
    return mcs_from_cqi(s.last_report.cqi);
}

double pf_metric(const UeSchedState& s, const SchedulerConfig& cfg)
{
    const double sinr = std::pow(10.0, s.reported_sinr_db / 10.0);
    return std::log2(1.0 + sinr) / std::max(s.avg_rate, cfg.avg_rate_floor);
}

// a is preferred over b
bool pf_better(const UeSchedState& a, const UeSchedState& b, const SchedulerConfig& cfg)
{
    if (a.pending_retx != b.pending_retx)
        return a.pending_retx;
    const double ma = pf_metric(a, cfg);
    const double mb = pf_metric(b, cfg);
    const double tol = 1e-12 * std::max(std::abs(ma), std::abs(mb));
    if (std::abs(ma - mb) > tol)
        return ma > mb;
    if (a.last_served_slot != b.last_served_slot)
        return a.last_served_slot < b.last_served_slot;
    return a.ue_id < b.ue_id;
}

} // namespace

UeSchedState make_ue_state(int ue_id, const SchedulerConfig& cfg)
{
    UeSchedState s;
    s.ue_id = ue_id;
    s.avg_rate = cfg.avg_rate_floor;
    s.last_report.ue_id = ue_id;
    return s;
}

std::optional<std::pair<int, int>> try_mu_pairing(std::span<const UeSchedState> states)
{
    std::vector<const UeSchedState*> order;
    for (const auto& s : states)
        order.push_back(&s);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto* a, const auto* b) { return a->ue_id < b->ue_id; });

    for (std::size_t i = 0; i < order.size(); ++i)
    {
        const auto& a = *order[i];
        if (a.pending_retx || a.buffered_bytes <= 0)
            continue;
        for (std::size_t k = i + 1; k < order.size(); ++k)
        {
            const auto& b = *order[k];
            if (b.pending_retx || b.buffered_bytes <= 0)
                continue;
            if (is_orthogonal_pair(a.last_report.pmi, b.last_report.pmi))
                return std::make_pair(a.ue_id, b.ue_id);
        }
    }
    return std::nullopt;
}

std::vector<Allocation> pf_schedule(std::span<const UeSchedState> states, int total_rb,
                                    const SchedulerConfig& cfg)
{
    if (total_rb < 1)
        throw std::invalid_argument("pf_schedule: total_rb must be >= 1");

    const UeSchedState* best = nullptr;
    for (const auto& s : states)
    {
        if (!has_data(s))
            continue;
        if (best == nullptr || pf_better(s, *best, cfg))
            best = &s;
    }
    if (best == nullptr)
        return {};

    Allocation a;
    a.ues.push_back({best->ue_id, 1.0, best->last_report.pmi});
    a.start_rb = 0;
    a.num_rb = total_rb;
    a.mcs_index = pick_mcs(*best, cfg);
    a.mode = AllocationMode::SingleUser;
    a.retransmission = best->pending_retx;
    return {a};
}

std::vector<Allocation> schedule_slot(std::span<const UeSchedState> states, int total_rb,
                                      const SchedulerConfig& cfg)
{
    if (total_rb < 1)
        throw std::invalid_argument("schedule_slot: total_rb must be >= 1");

    if (cfg.mu_mimo_enabled)
    {
        if (const auto pair = try_mu_pairing(states))
        {
            auto find = [&](int id) -> const UeSchedState& {
                return *std::find_if(states.begin(), states.end(),
                                     [id](const auto& s) { return s.ue_id == id; });
            };
            const auto& ue1 = find(pair->first);
            const auto& ue2 = find(pair->second);
            const double alpha = std::sqrt(0.5);

            Allocation a;
            a.ues.push_back({ue1.ue_id, alpha, ue1.last_report.pmi});
            a.ues.push_back({ue2.ue_id, alpha, ue2.last_report.pmi});
            a.start_rb = 0;
            a.num_rb = total_rb;
            a.mcs_index = pick_mcs(ue1, cfg);
            a.mode = AllocationMode::MuMimo;
            return {a};
        }
    }
    return pf_schedule(states, total_rb, cfg);
}

void update_average(UeSchedState& state, double delivered_bits, const SchedulerConfig& cfg)
{
    state.avg_rate = (1.0 - cfg.pf_beta) * state.avg_rate + cfg.pf_beta * delivered_bits;
    state.avg_rate = std::max(state.avg_rate, cfg.avg_rate_floor);
}

UeSchedState on_harq_feedback(UeSchedState state, bool ack, std::int64_t delivered_bits,
                              const SchedulerConfig& cfg)
{
    ++state.harq_attempts;
    if (ack)
    {
        state.pending_retx = false;
        state.harq_attempts = 0;
        update_average(state, static_cast<double>(delivered_bits), cfg);
        return state;
    }

    update_average(state, 0.0, cfg);
    if (state.harq_attempts >= cfg.max_harq_attempts)
    {
        state.pending_retx = false;
        state.harq_attempts = 0;
    }
    else
    {
        state.pending_retx = true;
    }
    return state;
}

} // namespace nrmu
