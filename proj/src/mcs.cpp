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

#include "nrmu/mcs.hpp"

#include "nrmu/csi.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nrmu
{

namespace
{

// clang-format off
constexpr std::array<McsEntry, kMaxMcsIndex + 1> kMcsTable{{
    { 0, 2, 120}, { 1, 2, 157}, { 2, 2, 193}, { 3, 2, 251}, { 4, 2, 308},
    { 5, 2, 379}, { 6, 2, 449}, { 7, 2, 526}, { 8, 2, 602}, { 9, 2, 679},
    {10, 4, 340}, {11, 4, 378}, {12, 4, 434}, {13, 4, 490}, {14, 4, 553},
    {15, 4, 616}, {16, 4, 658}, {17, 6, 438}, {18, 6, 466}, {19, 6, 517},
    {20, 6, 567}, {21, 6, 616}, {22, 6, 666}, {23, 6, 719}, {24, 6, 772},
    {25, 6, 822}, {26, 6, 873}, {27, 6, 910}, {28, 6, 948},
}};
// clang-format on

void check_params(const TbsParams& p)
{
    if (p.num_rb < 1)
        throw std::invalid_argument("num_rb must be >= 1");
    if (p.data_re_per_rb < 1 || p.data_re_per_rb > kRePerRb)
        throw std::invalid_argument("data_re_per_rb must be in 1.." + std::to_string(kRePerRb));
}

} // namespace

const McsEntry& mcs_lookup(int index)
{
    if (index < 0 || index > kMaxMcsIndex)
        throw std::domain_error("MCS index out of range: " + std::to_string(index));
    return kMcsTable[index];
}

std::int64_t compute_tbs(const TbsParams& p)
{
    check_params(p);
    // Integer arithmetic keeps the floor exact: bits = re * qm * R1024 / 1024.
    const std::int64_t re = static_cast<std::int64_t>(p.num_rb) * p.data_re_per_rb;
    const std::int64_t scaled = re * p.mcs.qm * p.mcs.code_rate_x1024;
    return 8 * (scaled / (1024 * 8));
}

std::int64_t coded_bits(const TbsParams& p)
{
    check_params(p);
    return static_cast<std::int64_t>(p.num_rb) * p.data_re_per_rb * p.mcs.qm;
}

double sinr_threshold_db(const McsEntry& mcs, double margin_db)
{
    return 10.0 * std::log10(std::exp2(mcs.spectral_efficiency()) - 1.0) + margin_db;
}

int mcs_from_cqi(int cqi)
{
    if (cqi < 0 || cqi > kMaxCqi)
        throw std::domain_error("CQI out of range: " + std::to_string(cqi));
    const double eff = cqi_efficiency_table()[cqi];
    int best = 0;
    for (const auto& row : kMcsTable)
        if (row.spectral_efficiency() <= eff + 1e-9)
            best = row.index;
    return best;
}

} // namespace nrmu
