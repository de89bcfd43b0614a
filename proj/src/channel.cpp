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

#include "nrmu/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace nrmu
{

double ChannelVector::norm_squared() const
{
    return std::norm(entries[0]) + std::norm(entries[1]);
}

std::pair<ChannelVector, ChannelVector> ideal_channels()
{
    ChannelVector h1{{Complex{1.0, 0.0}, Complex{0.0, 1.0}}, 0};
    ChannelVector h2{{Complex{1.0, 0.0}, Complex{0.0, -1.0}}, 1};
    return {h1, h2};
}

ChannelVector sample_rayleigh(std::uint64_t seed, int ue_id)
{
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(ue_id)));
    ChannelVector h;
    h.ue_id = ue_id;
    for (auto& e : h.entries)
        e = rng.complex_normal(1.0);
    return h;
}

Complex apply_channel(const ChannelVector& h, const AntennaVector& s)
{
    return h.entries[0] * s[0] + h.entries[1] * s[1];
}

Complex add_awgn(Complex y, const NoiseSpec& noise, Rng& rng)
{
    if (noise.variance == 0.0)
        return y;
    return y + rng.complex_normal(noise.variance);
}

double reference_rx_power(const ChannelVector& h)
{
    return kPilotPowerPerAntenna * h.norm_squared();
}

NoiseSpec noise_from_snr(double snr_db, const ChannelVector& h)
{
    if (!std::isfinite(snr_db))
        throw std::domain_error("noise_from_snr: snr_db must be finite");
    return {snr_db, reference_rx_power(h) / std::pow(10.0, snr_db / 10.0)};
}

} // namespace nrmu
