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

#ifndef NRMU_MCS_HPP
#define NRMU_MCS_HPP

#include <cstdint>

namespace nrmu
{

constexpr int kMaxMcsIndex = 28;
constexpr int kRePerRb = 12 * 14;
constexpr int kDefaultDataRePerRb = 144;

// One row of the 64QAM PDSCH MCS table.
struct McsEntry
{
    int index = 0;
    int qm = 2;
    int code_rate_x1024 = 0;

    double code_rate() const { return code_rate_x1024 / 1024.0; }
    double spectral_efficiency() const { return qm * code_rate(); }
};

struct TbsParams
{
    int num_rb = 1;
    int data_re_per_rb = kDefaultDataRePerRb;
    McsEntry mcs{};
};

// Throws std::domain_error outside 0..28.
const McsEntry& mcs_lookup(int index);

// Simplified TBS: floor to whole bytes of num_rb * data_re * qm * R.
// Throws std::invalid_argument if num_rb < 1 or data_re_per_rb is not in 1..168.
std::int64_t compute_tbs(const TbsParams& p);

// Modulated (codeword) bits carried by the allocation: num_rb * data_re * qm.
std::int64_t coded_bits(const TbsParams& p);

// Shannon-inverse SINR of the MCS's spectral efficiency plus margin_db.
double sinr_threshold_db(const McsEntry& mcs, double margin_db);

// Highest MCS whose spectral efficiency does not exceed the CQI's; 0 if none.
int mcs_from_cqi(int cqi);

} // namespace nrmu

#endif
