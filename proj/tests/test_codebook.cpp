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

#include <catch2/catch_amalgamated.hpp>

#include "nrmu/codebook.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

using namespace nrmu;
using Catch::Approx;

namespace
{
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kJ{0.0, 1.0};
} // namespace

TEST_CASE("get_precoder - codebook entries", "[codebook]")
{
    const auto& w1 = get_precoder(1);
    CHECK(std::abs(w1.entries[0] - kInvSqrt2) < 1e-15);
    CHECK(std::abs(w1.entries[1] - kInvSqrt2 * kJ) < 1e-15);

    const auto& w3 = get_precoder(3);
    CHECK(std::abs(w3.entries[1] + kInvSqrt2 * kJ) < 1e-15);

    const auto& w0 = get_precoder(0);
    CHECK(std::abs(w0.entries[1] - kInvSqrt2) < 1e-15);

    const auto& w2 = get_precoder(2);
    CHECK(std::abs(w2.entries[1] + kInvSqrt2) < 1e-15);

    for (int pmi = 0; pmi < kNumPmi; ++pmi)
    {
        const auto& w = get_precoder(pmi);
        CHECK(w.pmi_index == pmi);
        CHECK(w.entries[0] == Complex{std::numbers::sqrt2 / 2.0, 0.0});
        const double norm = std::sqrt(std::norm(w.entries[0]) + std::norm(w.entries[1]));
        CHECK(std::abs(norm - 1.0) < 1e-12);
    }
}

TEST_CASE("get_precoder - out of range", "[codebook]")
{
    CHECK_THROWS_AS(get_precoder(-1), std::domain_error);
    CHECK_THROWS_AS(get_precoder(4), std::domain_error);
}

TEST_CASE("is_orthogonal_pair", "[codebook]")
{
    CHECK(is_orthogonal_pair(0, 2));
    CHECK(is_orthogonal_pair(1, 3));
    CHECK_FALSE(is_orthogonal_pair(0, 1));
    CHECK_FALSE(is_orthogonal_pair(2, 2));
    CHECK_THROWS_AS(is_orthogonal_pair(0, 7), std::domain_error);
    CHECK_THROWS_AS(is_orthogonal_pair(-1, 2), std::domain_error);

    // |<w0, w1>| = |1 + j| / 2
    const auto& a = get_precoder(0).entries;
    const auto& b = get_precoder(1).entries;
    const Complex inner = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
    CHECK(std::abs(inner) == Approx(std::abs(Complex{1.0, 1.0}) / 2.0));

    std::set<std::pair<int, int>> pairs;
    for (int x = 0; x < kNumPmi; ++x)
        for (int y = 0; y < kNumPmi; ++y)
        {
            CHECK(is_orthogonal_pair(x, y) == is_orthogonal_pair(y, x));
            if (x < y && is_orthogonal_pair(x, y))
                pairs.insert({x, y});
        }
    CHECK(pairs == std::set<std::pair<int, int>>{{0, 2}, {1, 3}});
}

TEST_CASE("effective_gain", "[codebook]")
{
    const ChannelVector h1{{Complex{1, 0}, kJ}, 0};
    CHECK(effective_gain(h1, 3) == Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(effective_gain(h1, 1) < 1e-12);

    const ChannelVector e0{{Complex{1, 0}, Complex{0, 0}}, 0};
    for (int pmi = 0; pmi < kNumPmi; ++pmi)
        CHECK(effective_gain(e0, pmi) == Approx(kInvSqrt2).epsilon(1e-14));
}

TEST_CASE("effective_gain - invariant under a common phase", "[codebook]")
{
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ChannelVector h{{Complex{n(gen), n(gen)}, Complex{n(gen), n(gen)}}, 0};
        const Complex c = std::polar(1.0, phase(gen));
        const ChannelVector hc{{c * h.entries[0], c * h.entries[1]}, 0};
        for (int pmi = 0; pmi < kNumPmi; ++pmi)
            CHECK(std::abs(effective_gain(h, pmi) - effective_gain(hc, pmi)) < 1e-12);
    }
}
