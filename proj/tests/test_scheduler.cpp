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

#include "nrmu/codebook.hpp"
#include "nrmu/mcs.hpp"
#include "nrmu/scheduler.hpp"

#include <cmath>
#include <vector>

using namespace nrmu;
using Catch::Approx;

namespace
{

std::vector<UeSchedState> two_ues(int pmi_a, int pmi_b, const SchedulerConfig& cfg)
{
    std::vector<UeSchedState> s{make_ue_state(0, cfg), make_ue_state(1, cfg)};
    s[0].last_report = {0, 15, 1, pmi_a};
    s[1].last_report = {1, 15, 1, pmi_b};
    s[0].reported_sinr_db = s[1].reported_sinr_db = 20.0;
    s[0].buffered_bytes = s[1].buffered_bytes = 1000;
    return s;
}

SchedulerConfig forced(int mcs)
{
    SchedulerConfig cfg;
    cfg.forced_mcs = mcs;
    return cfg;
}

} // namespace

TEST_CASE("try_mu_pairing", "[scheduler]")
{
    const auto cfg = forced(13);
    auto s = two_ues(3, 1, cfg);
    const auto pair = try_mu_pairing(s);
    REQUIRE(pair.has_value());
    CHECK(pair->first == 0);
    CHECK(pair->second == 1);

    CHECK_FALSE(try_mu_pairing(two_ues(0, 1, cfg)).has_value());

    s = two_ues(1, 3, cfg);
    s[1].pending_retx = true;
    CHECK_FALSE(try_mu_pairing(s).has_value());

    s = two_ues(0, 2, cfg);
    s[0].buffered_bytes = 0;
    CHECK_FALSE(try_mu_pairing(s).has_value());

    // first valid pair in ue_id order, regardless of list order
    std::vector<UeSchedState> three{make_ue_state(7, cfg), make_ue_state(2, cfg), make_ue_state(4, cfg)};
    three[0].last_report.pmi = 2;
    three[1].last_report.pmi = 1;
    three[2].last_report.pmi = 0;
    for (auto& u : three)
        u.buffered_bytes = 10;
    const auto p3 = try_mu_pairing(three);
    REQUIRE(p3.has_value());
    CHECK(p3->first == 4);
    CHECK(p3->second == 7);
}

TEST_CASE("schedule_slot - MU-MIMO grant on orthogonal reports", "[scheduler]")
{
    auto cfg = forced(13);
    const auto allocs = schedule_slot(two_ues(3, 1, cfg), 106, cfg);
    REQUIRE(allocs.size() == 1);
    const auto& a = allocs[0];
    CHECK(a.mode == AllocationMode::MuMimo);
    REQUIRE(a.ues.size() == 2);
    CHECK(a.ues[0].ue_id == 0);
    CHECK(a.ues[1].ue_id == 1);
    CHECK(a.ues[0].pmi == 3);
    CHECK(a.ues[1].pmi == 1);
    CHECK(a.start_rb == 0);
    CHECK(a.num_rb == 106);
    CHECK(a.mcs_index == 13);
    CHECK(a.ues[0].alpha == Approx(std::sqrt(0.5)));
    CHECK(std::abs(a.ues[0].alpha * a.ues[0].alpha + a.ues[1].alpha * a.ues[1].alpha - 1.0) < 1e-12);
    CHECK_FALSE(a.retransmission);

    // UE_2 inherits UE_1's CQI-derived MCS when nothing is forced
    SchedulerConfig cqi_cfg;
    auto s = two_ues(0, 2, cqi_cfg);
    s[0].last_report.cqi = 9;
    s[1].last_report.cqi = 3;
    const auto cqi_allocs = schedule_slot(s, 52, cqi_cfg);
    REQUIRE(cqi_allocs.size() == 1);
    CHECK(cqi_allocs[0].mode == AllocationMode::MuMimo);
    CHECK(cqi_allocs[0].mcs_index == mcs_from_cqi(9));
}

TEST_CASE("schedule_slot - single UE and non-orthogonal fallbacks", "[scheduler]")
{
    const auto cfg = forced(16);
    std::vector<UeSchedState> one{two_ues(3, 1, cfg)[0]};
    auto allocs = schedule_slot(one, 106, cfg);
    REQUIRE(allocs.size() == 1);
    CHECK(allocs[0].mode == AllocationMode::SingleUser);
    CHECK(allocs[0].num_rb == 106);
    CHECK(allocs[0].ues.size() == 1);
    CHECK(allocs[0].ues[0].alpha == 1.0);

    allocs = schedule_slot(two_ues(0, 1, cfg), 106, cfg);
    REQUIRE(allocs.size() == 1);
    CHECK(allocs[0].mode == AllocationMode::SingleUser);
    CHECK(allocs[0].ues[0].pmi == 0);

    auto disabled = cfg;
    disabled.mu_mimo_enabled = false;
    allocs = schedule_slot(two_ues(3, 1, cfg), 106, disabled);
    REQUIRE(allocs.size() == 1);
    CHECK(allocs[0].mode == AllocationMode::SingleUser);

    CHECK_THROWS_AS(schedule_slot(two_ues(3, 1, cfg), 0, cfg), std::invalid_argument);
}

TEST_CASE("schedule_slot - exhaustive pairing rule", "[scheduler]")
{
    const auto cfg = forced(20);
    for (int pa = 0; pa < 4; ++pa)
        for (int pb = 0; pb < 4; ++pb)
            for (int flags = 0; flags < 4; ++flags)
            {
                auto s = two_ues(pa, pb, cfg);
                s[0].pending_retx = flags & 1;
                s[1].pending_retx = flags & 2;
                s[0].retx_mcs = s[1].retx_mcs = 20;
                const bool orth = (pa % 2 == pb % 2) && pa != pb;
                const bool expect_mu = orth && flags == 0;

                const auto allocs = schedule_slot(s, 106, cfg);
                REQUIRE(allocs.size() == 1);
                const auto& a = allocs[0];
                CHECK((a.mode == AllocationMode::MuMimo) == expect_mu);
                double power = 0.0;
                for (const auto& u : a.ues)
                    power += u.alpha * u.alpha;
                CHECK(std::abs(power - 1.0) < 1e-12);
                if (a.mode == AllocationMode::MuMimo)
                {
                    CHECK(a.ues.size() == 2);
                    CHECK(is_orthogonal_pair(a.ues[0].pmi, a.ues[1].pmi));
                    CHECK(a.start_rb == 0);
                    CHECK(a.num_rb == 106);
                    CHECK(a.mcs_index == 20);
                    CHECK_FALSE(a.retransmission);
                }
                else
                {
                    CHECK(a.ues.size() == 1);
                    if (flags != 0)
                    {
                        // a retransmission always goes out single-user
                        CHECK(a.retransmission);
                    }
                }
            }
}

TEST_CASE("pf_schedule", "[scheduler]")
{
    const auto cfg = forced(10);

    SECTION("symmetric UEs alternate")
    {
        auto s = two_ues(0, 1, cfg);
        int served[2] = {0, 0};
        int last = -1;
        constexpr int kSlots = 1000;
        for (int slot = 0; slot < kSlots; ++slot)
        {
            const auto a = pf_schedule(s, 106, cfg);
            REQUIRE(a.size() == 1);
            const int id = a[0].ues[0].ue_id;
            CHECK(id != last);
            last = id;
            ++served[id];
            s[id] = on_harq_feedback(s[id], true, 20000, cfg);
            s[id].last_served_slot = slot;
            update_average(s[1 - id], 0.0, cfg);
        }
        CHECK(std::abs(served[0] - kSlots / 2) <= 1);
        CHECK(std::abs(served[1] - kSlots / 2) <= 1);
    }

    SECTION("stronger channel wins at equal average")
    {
        auto s = two_ues(0, 1, cfg);
        s[0].reported_sinr_db = 10.0;
        s[1].reported_sinr_db = 10.0 + 20.0 * std::log10(2.0); // 2x amplitude gain
        s[0].avg_rate = s[1].avg_rate = 5000.0;
        const auto a = pf_schedule(s, 106, cfg);
        REQUIRE(a.size() == 1);
        CHECK(a[0].ues[0].ue_id == 1);
    }

    SECTION("empty buffer is skipped")
    {
        auto s = two_ues(0, 1, cfg);
        s[1].reported_sinr_db = 30.0;
        s[1].buffered_bytes = 0;
        const auto a = pf_schedule(s, 106, cfg);
        REQUIRE(a.size() == 1);
        CHECK(a[0].ues[0].ue_id == 0);

        s[0].buffered_bytes = 0;
        CHECK(pf_schedule(s, 106, cfg).empty());
    }

    SECTION("pending retransmission goes first with its original MCS")
    {
        auto s = two_ues(0, 1, cfg);
        s[0].reported_sinr_db = 30.0;
        s[1].pending_retx = true;
        s[1].retx_mcs = 4;
        const auto a = pf_schedule(s, 106, cfg);
        REQUIRE(a.size() == 1);
        CHECK(a[0].ues[0].ue_id == 1);
        CHECK(a[0].retransmission);
        CHECK(a[0].mcs_index == 4);
    }
}

TEST_CASE("on_harq_feedback", "[scheduler]")
{
    SchedulerConfig cfg;
    auto s = make_ue_state(0, cfg);

    s = on_harq_feedback(s, false, 0, cfg);
    CHECK(s.pending_retx);
    CHECK(s.avg_rate >= cfg.avg_rate_floor);
    s = on_harq_feedback(s, true, 1000, cfg);
    CHECK_FALSE(s.pending_retx);
    CHECK(s.harq_attempts == 0);

    // max_harq_attempts failures drop the TB
    for (int i = 0; i < cfg.max_harq_attempts - 1; ++i)
    {
        s = on_harq_feedback(s, false, 0, cfg);
        CHECK(s.pending_retx);
    }
    s = on_harq_feedback(s, false, 0, cfg);
    CHECK_FALSE(s.pending_retx);
    CHECK(s.harq_attempts == 0);

    // closed form: avg_N = B + (avg_0 - B) (1 - beta)^N
    auto t = make_ue_state(1, cfg);
    t.avg_rate = 10.0;
    constexpr double kBits = 4000.0;
    for (int n = 1; n <= 200; ++n)
    {
        t = on_harq_feedback(t, true, static_cast<std::int64_t>(kBits), cfg);
        const double expected = kBits + (10.0 - kBits) * std::pow(1.0 - cfg.pf_beta, n);
        CHECK(t.avg_rate == Approx(expected).epsilon(1e-12));
    }
    CHECK(t.avg_rate == Approx(kBits).epsilon(1e-4));
}
