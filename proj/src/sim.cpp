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

#include "nrmu/sim.hpp"

#include "nrmu/csi.hpp"
#include "nrmu/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace nrmu
{

namespace
{

constexpr std::uint64_t kDropStream = 0x64726f70ULL;
constexpr std::uint64_t kCsiStream = 0x637369ULL;

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(field + ": " + what);
}

// Per-UE bookkeeping owned by run_point.
struct UeContext
{
    UeSchedState sched;
    UeMetrics metrics;
    ChannelVector h;
    NoiseSpec noise;
    TransportBlock pending_tb;
};

void start_drop(const SimConfig& cfg, double snr_db, std::uint64_t seed, std::int64_t drop,
                std::vector<UeContext>& ues, Rng& rng)
{
    const std::uint64_t drop_seed = mix_seed(mix_seed(seed, kDropStream), static_cast<std::uint64_t>(drop));
    const auto [ideal1, ideal2] = ideal_channels();

    for (std::size_t k = 0; k < ues.size(); ++k)
    {
        const int id = static_cast<int>(k);
        switch (cfg.channel_mode)
        {
        case ChannelMode::Ideal:
            ues[k].h = k == 0 ? ideal1 : ideal2;
            break;
        case ChannelMode::Forced:
            ues[k].h = k == 0 ? cfg.forced_h1 : cfg.forced_h2;
            break;
        case ChannelMode::Rayleigh:
            ues[k].h = sample_rayleigh(drop_seed, id);
            break;
        }
        ues[k].h.ue_id = id;
        ues[k].noise = noise_from_snr(snr_db, ues[k].h);
    }

    const PilotBlock pilots = generate_csirs(mix_seed(drop_seed, kCsiStream), cfg.pilot_count());
    for (auto& ue : ues)
    {
        const auto rx = receive_pilots(ue.h, pilots, ue.noise, rng);
        const ChannelVector est = estimate_channel(rx, pilots);
        ue.sched.last_report = build_report(ue.sched.ue_id, est, ue.noise);
        ue.sched.reported_sinr_db = post_precoding_sinr_db(est, ue.sched.last_report.pmi, ue.noise);
    }
}

} // namespace

std::string_view to_string(SchedulerMode mode)
{
    switch (mode)
    {
    case SchedulerMode::MuMimoEnabled:
        return "mumimo";
    case SchedulerMode::ProportionalFairOnly:
        return "pf";
    case SchedulerMode::SingleUserOnly:
        return "su";
    }
    return "?";
}

std::string_view to_string(ChannelMode mode)
{
    switch (mode)
    {
    case ChannelMode::Ideal:
        return "ideal";
    case ChannelMode::Rayleigh:
        return "rayleigh";
    case ChannelMode::Forced:
        return "forced";
    }
    return "?";
}

double SimConfig::slot_duration_s() const
{
    return 1e-3 / (scs_khz / 15.0);
}

std::vector<double> SimConfig::default_snr_grid()
{
    std::vector<double> grid;
    for (int s = 0; s <= 40; s += 2)
        grid.push_back(s);
    return grid;
}

std::vector<int> SimConfig::default_mcs_list()
{
    std::vector<int> list;
    for (int m = 10; m <= kMaxMcsIndex; ++m)
        list.push_back(m);
    return list;
}

void validate(const SimConfig& cfg)
{
    require(cfg.num_rb >= 1 && cfg.num_rb <= 275, "num_rb", "must be in 1..275");
    require(cfg.scs_khz == 15 || cfg.scs_khz == 30 || cfg.scs_khz == 60 || cfg.scs_khz == 120,
            "scs_khz", "must be one of 15, 30, 60, 120");
    require(!cfg.snr_grid_db.empty(), "snr_db", "must not be empty");
    for (double s : cfg.snr_grid_db)
        require(std::isfinite(s), "snr_db", "values must be finite");
    require(!cfg.mcs_list.empty(), "mcs", "must not be empty");
    for (int m : cfg.mcs_list)
        require(m >= 0 && m <= kMaxMcsIndex, "mcs", "values must be in 0..28");
    require(cfg.tb_per_point >= 1, "tb_per_point", "must be >= 1");
    require(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0, "epsilon", "must be in (0, 1]");
    require(cfg.data_re_per_rb >= 1 && cfg.data_re_per_rb <= kRePerRb, "data_re_per_rb",
            "must be in 1..168");
    require(std::isfinite(cfg.threshold_margin_db), "threshold_margin_db", "must be finite");
    require(cfg.drop_slots >= 1, "drop_slots", "must be >= 1");
    require(cfg.csirs_pilots == 0 || cfg.csirs_pilots >= 2, "csirs_pilots", "must be 0 (auto) or >= 2");
    require(cfg.max_harq_attempts >= 1, "max_harq_attempts", "must be >= 1");
    require(cfg.workers >= 0, "workers", "must be >= 0");
    for (const auto* h : {&cfg.forced_h1, &cfg.forced_h2})
        for (const auto& e : h->entries)
            require(std::isfinite(e.real()) && std::isfinite(e.imag()), "h1/h2", "entries must be finite");
}

double PointMetrics::bler_max() const
{
    double m = 0.0;
    for (const auto& u : ues)
        m = std::max(m, u.bler());
    return m;
}

double PointMetrics::bler_avg() const
{
    if (ues.empty())
        return 0.0;
    double s = 0.0;
    for (const auto& u : ues)
        s += u.bler();
    return s / static_cast<double>(ues.size());
}

double PointMetrics::ue_throughput_bps(std::size_t k, double slot_duration_s) const
{
    if (slots_elapsed < 1)
        return 0.0;
    return throughput_from_counters(ues.at(k).bits_acked, slots_elapsed, slot_duration_s);
}

double throughput_from_counters(std::int64_t bits_acked, std::int64_t slots_elapsed,
                                double slot_duration_s)
{
    if (slots_elapsed < 1)
        throw std::domain_error("throughput_from_counters: slots_elapsed must be >= 1");
    return static_cast<double>(bits_acked) / (static_cast<double>(slots_elapsed) * slot_duration_s);
}

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t snr_idx, std::size_t mcs_idx)
{
    return mix_seed(mix_seed(master_seed, snr_idx), mcs_idx);
}

PointMetrics run_point(const SimConfig& cfg, double snr_db, int mcs_index, std::uint64_t seed)
{
    validate(cfg);
    const McsEntry& mcs = mcs_lookup(mcs_index);

    SchedulerConfig sched_cfg;
    sched_cfg.max_harq_attempts = cfg.max_harq_attempts;
    sched_cfg.mu_mimo_enabled = cfg.scheduler_mode == SchedulerMode::MuMimoEnabled;
    sched_cfg.forced_mcs = mcs_index;

    const LinkConfig link{cfg.link_model, cfg.epsilon, cfg.threshold_margin_db};
    const TbsParams tbs_params{cfg.num_rb, cfg.data_re_per_rb, mcs};
    const std::int64_t tbs = compute_tbs(tbs_params);
    const std::int64_t g_bits = coded_bits(tbs_params);

    const std::size_t num_ues = cfg.scheduler_mode == SchedulerMode::SingleUserOnly ? 1 : 2;
    std::vector<UeContext> ues(num_ues);
    for (std::size_t k = 0; k < num_ues; ++k)
    {
        ues[k].sched = make_ue_state(static_cast<int>(k), sched_cfg);
        ues[k].metrics.ue_id = static_cast<int>(k);
    }

    Rng rng(seed);
    PointMetrics pm;
    pm.snr_db = snr_db;
    pm.mcs_index = mcs_index;

    auto done = [&] {
        return std::all_of(ues.begin(), ues.end(), [&](const UeContext& u) {
            return u.metrics.new_blocks >= cfg.tb_per_point && !u.sched.pending_retx;
        });
    };

    std::int64_t slot = 0;
    while (!done())
    {
        if (slot % cfg.drop_slots == 0)
            start_drop(cfg, snr_db, seed, slot / cfg.drop_slots, ues, rng);

        std::vector<UeSchedState> states;
        for (auto& u : ues)
        {
            u.sched.buffered_bytes = u.metrics.new_blocks < cfg.tb_per_point ? tbs / 8 : 0;
            states.push_back(u.sched);
        }

        const auto allocs = schedule_slot(states, cfg.num_rb, sched_cfg);
        if (allocs.empty())
            throw std::logic_error("run_point: scheduler returned no allocation with data pending");

        std::vector<bool> served(num_ues, false);
        for (const auto& alloc : allocs)
        {
            std::vector<std::vector<std::uint8_t>> codewords;
            std::vector<ChannelVector> channels;
            std::vector<NoiseSpec> noise;
            for (const auto& su : alloc.ues)
            {
                auto& u = ues[static_cast<std::size_t>(su.ue_id)];
                if (!alloc.retransmission)
                {
                    u.pending_tb = {su.ue_id, random_bits(tbs, rng), tbs};
                    ++u.metrics.new_blocks;
                }
                codewords.push_back(make_codeword(u.pending_tb, g_bits, rng));
                channels.push_back(u.h);
                noise.push_back(u.noise);
            }

            const auto results = transmit_slot(alloc, codewords, channels, noise, cfg.num_rb,
                                               cfg.data_re_per_rb, link, rng);
            for (const auto& r : results)
            {
                auto& u = ues[static_cast<std::size_t>(r.ue_id)];
                ++u.metrics.blocks_attempted;
                const bool ack = !r.block_error;
                if (ack)
                    u.metrics.bits_acked += tbs;
                else
                    ++u.metrics.block_errors;
                u.sched.retx_mcs = alloc.mcs_index;
                u.sched = on_harq_feedback(u.sched, ack, ack ? tbs : 0, sched_cfg);
                u.sched.last_served_slot = slot;
                served[static_cast<std::size_t>(r.ue_id)] = true;
            }

            pm.rb_slots_used += alloc.num_rb;
            if (alloc.mode == AllocationMode::MuMimo)
                ++pm.mu_slots;
            else if (alloc.retransmission)
                ++pm.retx_slots;
            else
                ++pm.pf_new_data_slots;
        }

        for (std::size_t k = 0; k < num_ues; ++k)
            if (!served[k])
                update_average(ues[k].sched, 0.0, sched_cfg);
        ++slot;
    }

    pm.slots_elapsed = slot;
    for (const auto& u : ues)
    {
        pm.ues.push_back(u.metrics);
        pm.bits_delivered += u.metrics.bits_acked;
    }
    pm.throughput_bps = throughput_from_counters(pm.bits_delivered, pm.slots_elapsed, cfg.slot_duration_s());
    return pm;
}

RunMetrics run_sweep(const SimConfig& cfg)
{
    validate(cfg);
    RunMetrics run;
    run.mode = cfg.scheduler_mode;
    run.snr_grid_db = cfg.snr_grid_db;
    run.mcs_list = cfg.mcs_list;

    const std::size_t n_mcs = cfg.mcs_list.size();
    const std::size_t total = cfg.snr_grid_db.size() * n_mcs;
    run.points.resize(total);

    std::size_t workers = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                          : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t p = next++; p < total; p = next++)
        {
            const std::size_t si = p / n_mcs;
            const std::size_t mi = p % n_mcs;
            try
            {
                run.points[p] = run_point(cfg, cfg.snr_grid_db[si], cfg.mcs_list[mi],
                                          point_seed(cfg.seed, si, mi));
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
    return run;
}

std::vector<double> achievable_rate_envelope(const RunMetrics& run, double bler_target)
{
    std::vector<double> env(run.snr_grid_db.size(), 0.0);
    for (std::size_t si = 0; si < run.snr_grid_db.size(); ++si)
        for (std::size_t mi = 0; mi < run.mcs_list.size(); ++mi)
        {
            const auto& p = run.at(si, mi);
            if (p.bler_max() < bler_target)
                env[si] = std::max(env[si], p.throughput_bps);
        }
    return env;
}

} // namespace nrmu
