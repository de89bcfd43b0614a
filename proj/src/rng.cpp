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

#include "nrmu/rng.hpp"

#include <cmath>

namespace nrmu
{

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finalizer over a combined word
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Complex Rng::complex_normal(double variance)
{
    if (variance <= 0.0)
        return {0.0, 0.0};
    const double scale = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

} // namespace nrmu
