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

#ifndef NRMU_CODEBOOK_HPP
#define NRMU_CODEBOOK_HPP

#include "nrmu/channel.hpp"
#include "nrmu/types.hpp"

namespace nrmu
{

constexpr int kNumPmi = 4;

// Single-layer Type-I precoder for two antenna ports: (1/sqrt(2)) [1, phi]
// with phi = j^pmi.
struct PrecodingVector
{
    AntennaVector entries{};
    int pmi_index = 0;
};

// Throws std::domain_error unless 0 <= pmi < 4.
const PrecodingVector& get_precoder(int pmi);

// True iff <w_a, w_b> vanishes. Both indices must be valid.
bool is_orthogonal_pair(int pmi_a, int pmi_b);

// h * w_pmi, the scalar channel seen by a layer precoded with w_pmi.
Complex effective_channel(const ChannelVector& h, int pmi);

// |h * w_pmi|
double effective_gain(const ChannelVector& h, int pmi);

} // namespace nrmu

#endif
