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

#include <catch2/catch_amalgamated.hpp>

#include "nrmu/sim.hpp"

#include <cmath>

using namespace nrmu;
using Catch::Approx;

namespace
{

SimConfig small_config()
{
    SimConfig cfg;
    cfg.num_rb = 8;
    cfg.tb_per_point = 60;
    cfg.drop_slots = 20;
    return cfg;
}

void check_same(const PointMetrics& a, const PointMetrics& b)
{
    CHECK(a.slots_elapsed == b.slots_elapsed);
    CHECK(a.bits_delivered == b.bits_delivered);
    CHECK(a.mu_slots == b.mu_slots);
    CHECK(a.retx_slots == b.retx_slots);
    CHECK(a.throughput_bps == b.throughput_bps);
    REQUIRE(a.ues.size() == b.ues.size());
    for (std::size_t k = 0; k < a.ues.size(); ++k)
    {
        CHECK(a.ues[k].blocks_attempted == b.ues[k].blocks_attempted);
        CHECK(a.ues[k].block_errors == b.ues[k].block_errors);
        CHECK(a.ues[k].bits_acked == b.ues[k].bits_acked);
    }
}

} // namespace

TEST_CASE("throughput_from_counters", "[sim]")
{
    CHECK(throughput_from_counters(1000000, 200, 5e-4) == Approx(1e7));
    CHECK(throughput_from_counters(0, 200, 5e-4) == 0.0);
    CHECK(throughput_from_counters(1000000, 400, 5e-4) == Approx(0.5e7));
    CHECK_THROWS_AS(throughput_from_counters(10, 0, 5e-4), std::domain_error);
}

TEST_CASE("SimConfig defaults and validation", "[sim]")
{
    SimConfig cfg;
    CHECK(cfg.num_rb == 106);
    CHECK(cfg.scs_khz == 30);
    CHECK(cfg.slot_duration_s() == Approx(5e-4));
    CHECK(cfg.mcs_list.front() == 10);
    CHECK(cfg.mcs_list.back() == 28);
    CHECK(cfg.mcs_list.size() == 19);
    CHECK(cfg.snr_grid_db.size() == 21);
    CHECK(cfg.channel_mode == ChannelMode::Ideal);
    CHECK(cfg.seed == 1);
    CHECK(cfg.pilot_count() == 212);
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.num_rb = -1;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.mcs_list = {29};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.snr_grid_db.clear();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("run_point - ideal channels at high and low SNR", "[sim]")
{
    const auto cfg = small_config();
    for (int mcs : {10, 19, 28})
    {
        const auto p = run_point(cfg, 60.0, mcs, 5);
        REQUIRE(p.ues.size() == 2);
        CHECK(p.ues[0].bler() == 0.0);
        CHECK(p.ues[1].bler() == 0.0);
        // every slot is a MU-MIMO slot
        CHECK(p.mu_slots == p.slots_elapsed);
        CHECK(p.slots_elapsed == cfg.tb_per_point);
        const auto tbs = compute_tbs({cfg.num_rb, cfg.data_re_per_rb, mcs_lookup(mcs)});
        CHECK(p.bits_delivered == 2 * cfg.tb_per_point * tbs);
        CHECK(p.rb_slots_used == cfg.num_rb * p.slots_elapsed);
    }

    const auto low = run_point(cfg, -20.0, 28, 5);
    CHECK(low.ues[0].bler() == 1.0);
    CHECK(low.ues[1].bler() == 1.0);
    CHECK(low.bits_delivered == 0);
    CHECK(low.throughput_bps == 0.0);
}

TEST_CASE("run_point - HARQ fallback and accounting", "[sim]")
{
    auto cfg = small_config();
    cfg.tb_per_point = 200;
    // near the MCS 16 waterfall: some blocks fail
    const auto p = run_point(cfg, 4.0, 16, 11);
    CHECK(p.retx_slots > 0);
    CHECK(p.mu_slots + p.retx_slots + p.pf_new_data_slots == p.slots_elapsed);

    const auto tbs = compute_tbs({cfg.num_rb, cfg.data_re_per_rb, mcs_lookup(16)});
    std::int64_t acked = 0;
    for (const auto& u : p.ues)
    {
        CHECK(u.new_blocks == cfg.tb_per_point);
        CHECK(u.bits_acked == (u.blocks_attempted - u.block_errors) * tbs);
        CHECK(u.blocks_attempted >= u.new_blocks);
        acked += u.bits_acked;
    }
    CHECK(p.bits_delivered == acked);
    CHECK(p.throughput_bps == Approx(acked / (p.slots_elapsed * 5e-4)));
}

TEST_CASE("run_point - determinism", "[sim]")
{
    auto cfg = small_config();
    check_same(run_point(cfg, 10.0, 17, 99), run_point(cfg, 10.0, 17, 99));
    cfg.channel_mode = ChannelMode::Rayleigh;
    check_same(run_point(cfg, 15.0, 12, 7), run_point(cfg, 15.0, 12, 7));
}

TEST_CASE("run_point - Rayleigh drops exercise the unpaired path", "[sim]")
{
    auto cfg = small_config();
    cfg.channel_mode = ChannelMode::Rayleigh;
    cfg.drop_slots = 5;
    cfg.tb_per_point = 200;
    const auto p = run_point(cfg, 30.0, 10, 3);
    CHECK(p.pf_new_data_slots > 0);
    CHECK(p.mu_slots > 0);
}

TEST_CASE("run_point - forced channels without orthogonal PMIs never pair", "[sim]")
{
    auto cfg = small_config();
    cfg.channel_mode = ChannelMode::Forced;
    cfg.forced_h1 = {{Complex{1, 0}, Complex{1, 0}}, 0}; // PMI 0
    cfg.forced_h2 = {{Complex{1, 0}, Complex{0, 1}}, 1}; // PMI 3
    const auto p = run_point(cfg, 40.0, 10, 3);
    CHECK(p.mu_slots == 0);
    CHECK(p.slots_elapsed == 2 * cfg.tb_per_point);
}

TEST_CASE("run_sweep - points are independent and worker-count invariant", "[sim]")
{
    auto cfg = small_config();
    cfg.snr_grid_db = {6.0, 14.0};
    cfg.mcs_list = {13, 22};
    cfg.workers = 1;
    const auto serial = run_sweep(cfg);
    cfg.workers = 3;
    const auto parallel = run_sweep(cfg);
    REQUIRE(serial.points.size() == 4);
    REQUIRE(parallel.points.size() == 4);
    for (std::size_t si = 0; si < 2; ++si)
        for (std::size_t mi = 0; mi < 2; ++mi)
        {
            const auto& p = serial.at(si, mi);
            CHECK(p.snr_db == cfg.snr_grid_db[si]);
            CHECK(p.mcs_index == cfg.mcs_list[mi]);
            check_same(p, parallel.at(si, mi));
            check_same(p, run_point(cfg, cfg.snr_grid_db[si], cfg.mcs_list[mi], point_seed(cfg.seed, si, mi)));
        }
}

TEST_CASE("run_sweep - MU-MIMO doubles single-user throughput when error free", "[sim]")
{
    auto cfg = small_config();
    cfg.snr_grid_db = {40.0};
    cfg.mcs_list = {10, 20, 28};
    const auto mu = run_sweep(cfg);
    cfg.scheduler_mode = SchedulerMode::SingleUserOnly;
    const auto su = run_sweep(cfg);
    for (std::size_t mi = 0; mi < cfg.mcs_list.size(); ++mi)
    {
        REQUIRE(su.at(0, mi).ues.size() == 1);
        CHECK(mu.at(0, mi).throughput_bps / su.at(0, mi).throughput_bps == Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("run_sweep - BLER and achievable rate trends", "[sim]")
{
    auto cfg = small_config();
    cfg.num_rb = 4;
    cfg.tb_per_point = 1000;
    cfg.snr_grid_db = {};
    for (int s = 0; s <= 30; s += 3)
        cfg.snr_grid_db.push_back(s);
    cfg.mcs_list = {10, 16, 22, 28};
    const auto run = run_sweep(cfg);

    // bler(snr + 6 dB) <= bler(snr) + 0.03
    for (std::size_t mi = 0; mi < cfg.mcs_list.size(); ++mi)
        for (std::size_t si = 0; si + 2 < cfg.snr_grid_db.size(); ++si)
            for (std::size_t k = 0; k < 2; ++k)
                CHECK(run.at(si + 2, mi).ues[k].bler() <= run.at(si, mi).ues[k].bler() + 0.03);

    const auto env = achievable_rate_envelope(run, 0.1);
    REQUIRE(env.size() == cfg.snr_grid_db.size());
    for (std::size_t si = 1; si < env.size(); ++si)
        CHECK(env[si] >= env[si - 1]);
    CHECK(env.back() > env.front());
}
