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

#include "nrmu/codebook.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace nrmu
{

namespace
{

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

constexpr std::array<Complex, kNumPmi> kCoPhase{
    Complex{1.0, 0.0}, Complex{0.0, 1.0}, Complex{-1.0, 0.0}, Complex{0.0, -1.0}};

std::array<PrecodingVector, kNumPmi> build_codebook()
{
    std::array<PrecodingVector, kNumPmi> book{};
    for (int i = 0; i < kNumPmi; ++i)
        book[i] = {{Complex{kInvSqrt2, 0.0}, kInvSqrt2 * kCoPhase[i]}, i};
    return book;
}

const std::array<PrecodingVector, kNumPmi> kCodebook = build_codebook();

void check_pmi(int pmi)
{
    if (pmi < 0 || pmi >= kNumPmi)
        throw std::domain_error("PMI out of range: " + std::to_string(pmi));
}

} // namespace

const PrecodingVector& get_precoder(int pmi)
{
    check_pmi(pmi);
    return kCodebook[pmi];
}

bool is_orthogonal_pair(int pmi_a, int pmi_b)
{
    const auto& a = get_precoder(pmi_a).entries;
    const auto& b = get_precoder(pmi_b).entries;
    const Complex inner = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
    return std::abs(inner) < kExactTol;
}

Complex effective_channel(const ChannelVector& h, int pmi)
{
    return apply_channel(h, get_precoder(pmi).entries);
}

double effective_gain(const ChannelVector& h, int pmi)
{
    return std::abs(effective_channel(h, pmi));
}

} // namespace nrmu
