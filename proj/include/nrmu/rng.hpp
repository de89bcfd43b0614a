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

#ifndef NRMU_RNG_HPP
#define NRMU_RNG_HPP

#include "nrmu/types.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cstdint>

namespace nrmu
{

// Mixes two 64-bit values into a new seed. Used to derive independent,
// individually reproducible streams (per grid point, per drop, per UE).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Seeded random source owned by a single worker.
//
// mt19937_64 is a fully specified generator and the boost ziggurat
// normal sampler is implementation-independent, so a given seed reproduces
// the same draws on every toolchain.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits64() { return engine_(); }

    // Standard normal N(0, 1).
    double normal() { return normal_(engine_); }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    Complex complex_normal(double variance);

  private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
};

} // namespace nrmu

#endif
