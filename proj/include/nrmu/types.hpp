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

#ifndef NRMU_TYPES_HPP
#define NRMU_TYPES_HPP

#include <array>
#include <complex>

namespace nrmu
{

using Complex = std::complex<double>;

constexpr int kNumTxAntennas = 2;

// One complex value per gNB transmit antenna (precoder weights or a TX sample).
using AntennaVector = std::array<Complex, kNumTxAntennas>;

// Tolerance for quantities that are analytically zero.
constexpr double kExactTol = 1e-12;

} // namespace nrmu

#endif
