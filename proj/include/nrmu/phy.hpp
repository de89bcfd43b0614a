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

#ifndef NRMU_PHY_HPP
#define NRMU_PHY_HPP

#include "nrmu/channel.hpp"
#include "nrmu/mcs.hpp"
#include "nrmu/rng.hpp"
#include "nrmu/scheduler.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nrmu
{

constexpr int kSymbolsPerSlot = 14;

// Transmit samples of the data REs of one slot, RB-major.
struct ResourceGrid
{
    int num_rb = 0;
    int symbols_per_slot = kSymbolsPerSlot;
    int data_re_per_rb = kDefaultDataRePerRb;
    std::vector<AntennaVector> tx;

    std::size_t re_index(int rb, int re) const
    {
        return static_cast<std::size_t>(rb) * data_re_per_rb + re;
    }
};

struct TransportBlock
{
    int ue_id = 0;
    std::vector<std::uint8_t> bits; // one bit per byte
    std::int64_t tbs = 0;
};

struct LinkResult
{
    int ue_id = 0;
    std::int64_t bit_errors = 0;
    std::int64_t total_bits = 0;
    bool block_error = false;
    double post_sinr_db = 0.0;
};

enum class LinkModel
{
    BoundedDistance, // raw bit-error budget
    Threshold        // mean post-equalisation SINR against the MCS threshold
};

struct LinkConfig
{
    LinkModel model = LinkModel::BoundedDistance;
    double epsilon = 0.5;
    double threshold_margin_db = 3.0;
};

// Unit-energy Gray QAM points (qm = 2, 4, 6). Point k carries bits
// b0..b(qm-1) with b0 as the most significant bit of k.
std::span<const Complex> constellation(int qm);

// Throws std::domain_error for an unsupported qm or a bit count that is not a
// multiple of qm.
std::vector<Complex> modulate(std::span<const std::uint8_t> bits, int qm);

// Index of the nearest constellation point.
unsigned hard_decision(Complex x, int qm);

std::vector<std::uint8_t> demodulate_hard(std::span<const Complex> symbols, int qm);

// s = sum_k alpha_k w_k x_k over the UEs of the allocation. x2 must be present
// exactly when the allocation is MuMimo (std::domain_error otherwise).
AntennaVector precode_superpose(Complex x1, std::optional<Complex> x2, const Allocation& alloc);

Complex receive(const ChannelVector& h, const AntennaVector& s, const NoiseSpec& noise, Rng& rng);

// Scalar zero-forcing receiver for one UE of an allocation.
struct Equalizer
{
    Complex gain{};         // alpha * h * w of the intended layer
    double post_sinr = 0.0; // |gain|^2 / (noise + co-scheduled interference)
    bool usable = false;    // |gain| >= 1e-9
};

Equalizer make_equalizer(const ChannelVector& h, const Allocation& alloc, std::size_t ue_index,
                         double noise_variance);

struct Demapped
{
    std::vector<std::uint8_t> bits;
    double post_sinr = 0.0;
    bool decode_failure = false;
};

// Equalise y with the UE's effective channel and hard-demap to bits.
Demapped equalize_demap(Complex y, const ChannelVector& h, const Allocation& alloc,
                        std::size_t ue_index, double noise_variance);

// True when bit_errors exceeds floor(epsilon * (1 - R) * total_bits).
bool decide_block_error(std::int64_t bit_errors, std::int64_t total_bits, const McsEntry& mcs,
                        double epsilon);

// Transport block bits followed by pseudo-random parity up to coded_bits.
std::vector<std::uint8_t> make_codeword(const TransportBlock& tb, std::int64_t coded_bits, Rng& rng);

std::vector<std::uint8_t> random_bits(std::int64_t count, Rng& rng);

// Maps each UE's codeword onto the allocated RBs of a carrier grid and
// precodes/superposes the layers.
ResourceGrid map_to_grid(const Allocation& alloc, std::span<const std::vector<std::uint8_t>> codewords,
                         int carrier_rb, int data_re_per_rb);

// One slot end to end: grid mapping, per-UE reception, equalisation, hard
// demapping and the block-error decision. channels and noise are indexed like
// alloc.ues.
std::vector<LinkResult> transmit_slot(const Allocation& alloc,
                                      std::span<const std::vector<std::uint8_t>> codewords,
                                      std::span<const ChannelVector> channels,
                                      std::span<const NoiseSpec> noise, int carrier_rb,
                                      int data_re_per_rb, const LinkConfig& link, Rng& rng);

} // namespace nrmu

#endif
