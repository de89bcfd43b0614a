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

#include "nrmu/csi.hpp"

#include "nrmu/codebook.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nrmu
{

namespace
{

// Shannon gap applied before comparing against the CQI efficiencies.
constexpr double kCqiGapDb = 3.0;

} // namespace

const std::array<double, kMaxCqi + 1>& cqi_efficiency_table()
{
    static const std::array<double, kMaxCqi + 1> table{
        0.0,    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766,
        1.9141, 2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};
    return table;
}

PilotBlock generate_csirs(std::uint64_t seed, int length)
{
    if (length < 1)
        throw std::domain_error("generate_csirs: length must be >= 1");

    const double amp = std::sqrt(kPilotPowerPerAntenna / 2.0);
    Rng rng(seed);
    PilotBlock block;
    block.symbols.resize(static_cast<std::size_t>(length));
    std::uint64_t word = 0;
    int left = 0;
    for (std::size_t re = 0; re < block.symbols.size(); ++re)
    {
        if (left == 0)
        {
            word = rng.bits64();
            left = 32;
        }
        const double re_part = (word & 1U) ? -amp : amp;
        const double im_part = (word & 2U) ? -amp : amp;
        word >>= 2;
        --left;
        block.symbols[re][PilotBlock::antenna_of(re)] = {re_part, im_part};
    }
    return block;
}

std::vector<Complex> receive_pilots(const ChannelVector& h, const PilotBlock& pilots,
                                    const NoiseSpec& noise, Rng& rng)
{
    std::vector<Complex> rx;
    rx.reserve(pilots.length());
    for (const auto& s : pilots.symbols)
        rx.push_back(add_awgn(apply_channel(h, s), noise, rng));
    return rx;
}

ChannelVector estimate_channel(std::span<const Complex> rx, const PilotBlock& pilots)
{
    if (rx.size() != pilots.length())
        throw std::invalid_argument("estimate_channel: rx and pilot lengths differ");

    std::array<Complex, kNumTxAntennas> sum{};
    std::array<int, kNumTxAntennas> count{};
    for (std::size_t re = 0; re < rx.size(); ++re)
    {
        const int ant = PilotBlock::antenna_of(re);
        sum[ant] += rx[re] / pilots.symbols[re][ant];
        ++count[ant];
    }

    ChannelVector h;
    for (int a = 0; a < kNumTxAntennas; ++a)
    {
        if (count[a] == 0)
            throw std::domain_error("estimate_channel: antenna without pilot REs");
        h.entries[a] = sum[a] / static_cast<double>(count[a]);
    }
    return h;
}

int select_pmi(const ChannelVector& h_est)
{
    int best = 0;
    double best_gain = effective_gain(h_est, 0);
    for (int pmi = 1; pmi < kNumPmi; ++pmi)
    {
        const double g = effective_gain(h_est, pmi);
        if (g > best_gain)
        {
            best_gain = g;
            best = pmi;
        }
    }
    return best;
}

int compute_cqi(double post_precoding_sinr_db)
{
    const double sinr = std::pow(10.0, post_precoding_sinr_db / 10.0);
    const double eff = std::log2(1.0 + sinr / std::pow(10.0, kCqiGapDb / 10.0));
    const auto& table = cqi_efficiency_table();
    int cqi = 0;
    for (int i = 1; i <= kMaxCqi; ++i)
        if (table[i] <= eff)
            cqi = i;
    return cqi;
}

double post_precoding_sinr_db(const ChannelVector& h_est, int pmi, const NoiseSpec& noise)
{
    const double g2 = std::norm(effective_channel(h_est, pmi));
    if (noise.variance <= 0.0)
        return g2 > 0.0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(g2 / noise.variance);
}

CsiReport build_report(int ue_id, const ChannelVector& h_est, const NoiseSpec& noise)
{
    CsiReport report;
    report.ue_id = ue_id;
    report.pmi = select_pmi(h_est);
    report.ri = 1;
    report.cqi = compute_cqi(post_precoding_sinr_db(h_est, report.pmi, noise));
    return report;
}

} // namespace nrmu
