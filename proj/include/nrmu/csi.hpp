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

#ifndef NRMU_CSI_HPP
#define NRMU_CSI_HPP

#include "nrmu/channel.hpp"
#include "nrmu/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nrmu
{

constexpr int kMaxCqi = 15;

// Per-UE CSI feedback. A single receive antenna limits the rank to one.
struct CsiReport
{
    int ue_id = 0;
    int cqi = 0;
    int ri = 1;
    int pmi = 0;
};

// CSI-RS pilots. RE i is driven by antenna i % 2 only; the other antenna is
// silent on that RE, so both ports are separable at the UE.
struct PilotBlock
{
    std::vector<AntennaVector> symbols;

    std::size_t length() const { return symbols.size(); }
    static int antenna_of(std::size_t re) { return static_cast<int>(re % kNumTxAntennas); }
};

// 4-bit CQI table (spectral efficiency in bits per RE), index 0 = out of range.
const std::array<double, kMaxCqi + 1>& cqi_efficiency_table();

// Deterministic QPSK pilots scaled to kPilotPowerPerAntenna.
// Throws std::domain_error for length < 1.
PilotBlock generate_csirs(std::uint64_t seed, int length);

// Pushes the pilot block through h and adds AWGN, one sample per pilot RE.
std::vector<Complex> receive_pilots(const ChannelVector& h, const PilotBlock& pilots,
                                    const NoiseSpec& noise, Rng& rng);

// Per-antenna least-squares estimate: mean of rx / pilot over the antenna's REs.
// Throws std::domain_error when an antenna has no pilot RE, std::invalid_argument
// when rx and pilots are not aligned.
ChannelVector estimate_channel(std::span<const Complex> rx, const PilotBlock& pilots);

// Codebook index maximising |h * w|, lowest index on ties.
int select_pmi(const ChannelVector& h_est);

int compute_cqi(double post_precoding_sinr_db);

// SINR of a single-user, full-power layer precoded with pmi.
double post_precoding_sinr_db(const ChannelVector& h_est, int pmi, const NoiseSpec& noise);

CsiReport build_report(int ue_id, const ChannelVector& h_est, const NoiseSpec& noise);

} // namespace nrmu

#endif
