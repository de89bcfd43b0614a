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

#ifndef NRMU_CHANNEL_HPP
#define NRMU_CHANNEL_HPP

#include "nrmu/rng.hpp"
#include "nrmu/types.hpp"

#include <cstdint>
#include <utility>

namespace nrmu
{

// 1x2 downlink channel row between the gNB antennas and one single-antenna UE.
struct ChannelVector
{
    AntennaVector entries{};
    int ue_id = 0;

    double norm_squared() const;
};

// AWGN statistics for one UE. variance is per complex sample.
struct NoiseSpec
{
    double snr_db = 0.0;
    double variance = 0.0;
};

// CSI-RS power per transmit antenna; the total pilot power is 1.
constexpr double kPilotPowerPerAntenna = 0.5;

// h1 = [1, j], h2 = [1, -j]
std::pair<ChannelVector, ChannelVector> ideal_channels();

// i.i.d. CN(0, 1) entries. The draw depends only on (seed, ue_id).
ChannelVector sample_rayleigh(std::uint64_t seed, int ue_id);

// Noiseless receive sample h * s.
Complex apply_channel(const ChannelVector& h, const AntennaVector& s);

Complex add_awgn(Complex y, const NoiseSpec& noise, Rng& rng);

// Received CSI-RS power for channel h under the per-antenna pilot convention.
double reference_rx_power(const ChannelVector& h);

// Noise whose power sits snr_db below the UE's received CSI-RS power.
// Throws std::domain_error for a non-finite snr_db.
NoiseSpec noise_from_snr(double snr_db, const ChannelVector& h);

} // namespace nrmu

#endif
