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

#include "nrmu/phy.hpp"

#include "nrmu/codebook.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nrmu
{

namespace
{

struct QamTable
{
    std::vector<Complex> points;
    double scale = 1.0; // multiplies a unit-energy sample onto the integer lattice
};

// Amplitude on the odd-integer lattice for the bits of one I or Q rail
// (b_first is the sign bit).
int rail_amplitude(int qm, unsigned rail_bits)
{
    // rail_bits holds the qm/2 bits of the rail, first bit most significant.
    const int n = qm / 2;
    auto bit = [&](int i) { return static_cast<int>((rail_bits >> (n - 1 - i)) & 1U); };
    const int sign = 1 - 2 * bit(0);
    switch (qm)
    {
    case 2:
        return sign;
    case 4:
        return sign * (2 - (1 - 2 * bit(1)));
    default:
        return sign * (4 - (1 - 2 * bit(1)) * (2 - (1 - 2 * bit(2))));
    }
}

QamTable build_table(int qm)
{
    QamTable t;
    const int m = 1 << qm;
    const double norm = qm == 2 ? 2.0 : (qm == 4 ? 10.0 : 42.0);
    t.scale = std::sqrt(norm);
    t.points.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
    {
        // Interleave: even bit positions (b0, b2, ...) drive I, odd ones drive Q.
        unsigned i_bits = 0, q_bits = 0;
        for (int b = 0; b < qm; ++b)
        {
            const unsigned v = (static_cast<unsigned>(k) >> (qm - 1 - b)) & 1U;
            if (b % 2 == 0)
                i_bits = (i_bits << 1) | v;
            else
                q_bits = (q_bits << 1) | v;
        }
        t.points[k] = Complex{static_cast<double>(rail_amplitude(qm, i_bits)),
                              static_cast<double>(rail_amplitude(qm, q_bits))} / t.scale;
    }
    return t;
}

const QamTable& table_for(int qm)
{
    static const std::array<QamTable, 3> tables{build_table(2), build_table(4), build_table(6)};
    switch (qm)
    {
    case 2:
        return tables[0];
    case 4:
        return tables[1];
    case 6:
        return tables[2];
    default:
        throw std::domain_error("unsupported modulation order: " + std::to_string(qm));
    }
}

// Bits of one rail from a lattice-scaled amplitude, sign bit first.
inline unsigned slice_rail(double v, int qm)
{
    const double a = std::abs(v);
    const unsigned sign = v < 0.0 ? 1U : 0U;
    switch (qm)
    {
    case 2:
        return sign;
    case 4:
        return (sign << 1) | (a > 2.0 ? 1U : 0U);
    default:
        return (sign << 2) | ((a > 4.0 ? 1U : 0U) << 1) | (std::abs(a - 4.0) > 2.0 ? 1U : 0U);
    }
}

unsigned pack_symbol(const std::uint8_t* bits, int qm)
{
    unsigned k = 0;
    for (int b = 0; b < qm; ++b)
        k = (k << 1) | (bits[b] & 1U);
    return k;
}

void check_grid_inputs(const Allocation& alloc, std::span<const std::vector<std::uint8_t>> codewords,
                       int carrier_rb, int data_re_per_rb)
{
    if (codewords.size() != alloc.ues.size())
        throw std::invalid_argument("one codeword per scheduled UE required");
    if (alloc.start_rb < 0 || alloc.num_rb < 1 || alloc.start_rb + alloc.num_rb > carrier_rb)
        throw std::invalid_argument("allocation outside the carrier");
    if (data_re_per_rb < 1 || data_re_per_rb > kRePerRb)
        throw std::invalid_argument("data_re_per_rb outside 1..168");
    const auto qm = static_cast<std::size_t>(mcs_lookup(alloc.mcs_index).qm);
    const std::size_t n_re = static_cast<std::size_t>(alloc.num_rb) * data_re_per_rb;
    for (const auto& cw : codewords)
        if (cw.size() != n_re * qm)
            throw std::invalid_argument("codeword length does not fill the allocation");
}

inline unsigned interleave_rails(unsigned i_bits, unsigned q_bits, int qm)
{
    const int n = qm / 2;
    unsigned k = 0;
    for (int b = 0; b < n; ++b)
    {
        k = (k << 1) | ((i_bits >> (n - 1 - b)) & 1U);
        k = (k << 1) | ((q_bits >> (n - 1 - b)) & 1U);
    }
    return k;
}

constexpr std::array<std::uint8_t, 64> kPopcount6 = [] {
    std::array<std::uint8_t, 64> t{};
    for (unsigned i = 0; i < 64; ++i)
        t[i] = static_cast<std::uint8_t>(std::popcount(i));
    return t;
}();

// Received symbol y = c_own x_own + c_other x_other + n, equalized onto the
// integer lattice and compared bit by bit against the transmitted index.
template <int Qm>
std::int64_t count_bit_errors(const Complex* points, const std::uint8_t* own, const std::uint8_t* other,
                              Complex c_own, Complex c_other, Complex to_lattice, double sd,
                              std::size_t n_re, Rng& rng)
{
    std::int64_t errors = 0;
    for (std::size_t re = 0; re < n_re; ++re)
    {
        Complex y = c_own * points[own[re]];
        if (other)
            y += c_other * points[other[re]];
        if (sd > 0.0)
        {
            const double nr = rng.normal();
            const double ni = rng.normal();
            y += Complex{sd * nr, sd * ni};
        }
        const Complex z = y * to_lattice;
        const unsigned decided = interleave_rails(slice_rail(z.real(), Qm), slice_rail(z.imag(), Qm), Qm);
        errors += kPopcount6[(decided ^ own[re]) & 63U];
    }
    return errors;
}

} // namespace

std::span<const Complex> constellation(int qm)
{
    return table_for(qm).points;
}

std::vector<Complex> modulate(std::span<const std::uint8_t> bits, int qm)
{
    const auto& t = table_for(qm);
    if (bits.size() % static_cast<std::size_t>(qm) != 0)
        throw std::domain_error("modulate: bit count is not a multiple of qm");
    std::vector<Complex> out(bits.size() / qm);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = t.points[pack_symbol(bits.data() + i * qm, qm)];
    return out;
}

unsigned hard_decision(Complex x, int qm)
{
    const auto& t = table_for(qm);
    const unsigned i_bits = slice_rail(x.real() * t.scale, qm);
    const unsigned q_bits = slice_rail(x.imag() * t.scale, qm);
    return interleave_rails(i_bits, q_bits, qm);
}

std::vector<std::uint8_t> demodulate_hard(std::span<const Complex> symbols, int qm)
{
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * qm);
    for (const auto& x : symbols)
    {
        const unsigned k = hard_decision(x, qm);
        for (int b = 0; b < qm; ++b)
            bits.push_back(static_cast<std::uint8_t>((k >> (qm - 1 - b)) & 1U));
    }
    return bits;
}

AntennaVector precode_superpose(Complex x1, std::optional<Complex> x2, const Allocation& alloc)
{
    const bool mu = alloc.mode == AllocationMode::MuMimo;
    if (mu != x2.has_value())
        throw std::domain_error("precode_superpose: second symbol must be present iff MU-MIMO");
    if (alloc.ues.size() != (mu ? 2U : 1U))
        throw std::domain_error("precode_superpose: allocation UE count does not match its mode");

    AntennaVector s{};
    auto add = [&s](const ScheduledUe& ue, Complex x) {
        const auto& w = get_precoder(ue.pmi).entries;
        s[0] += ue.alpha * w[0] * x;
        s[1] += ue.alpha * w[1] * x;
    };
    add(alloc.ues[0], x1);
    if (mu)
        add(alloc.ues[1], *x2);
    return s;
}

Complex receive(const ChannelVector& h, const AntennaVector& s, const NoiseSpec& noise, Rng& rng)
{
    return add_awgn(apply_channel(h, s), noise, rng);
}

Equalizer make_equalizer(const ChannelVector& h, const Allocation& alloc, std::size_t ue_index,
                         double noise_variance)
{
    if (ue_index >= alloc.ues.size())
        throw std::out_of_range("make_equalizer: ue_index outside allocation");

    Equalizer eq;
    double interference = 0.0;
    for (std::size_t k = 0; k < alloc.ues.size(); ++k)
    {
        const Complex g = alloc.ues[k].alpha * effective_channel(h, alloc.ues[k].pmi);
        if (k == ue_index)
            eq.gain = g;
        else
            interference += std::norm(g);
    }
    eq.usable = std::abs(eq.gain) >= 1e-9;
    const double denom = noise_variance + interference;
    if (!eq.usable)
        eq.post_sinr = 0.0;
    else if (denom <= 0.0)
        eq.post_sinr = std::numeric_limits<double>::infinity();
    else
        eq.post_sinr = std::norm(eq.gain) / denom;
    return eq;
}

Demapped equalize_demap(Complex y, const ChannelVector& h, const Allocation& alloc,
                        std::size_t ue_index, double noise_variance)
{
    const Equalizer eq = make_equalizer(h, alloc, ue_index, noise_variance);
    const int qm = mcs_lookup(alloc.mcs_index).qm;
    Demapped out;
    out.post_sinr = eq.post_sinr;
    if (!eq.usable)
    {
        out.decode_failure = true;
        return out;
    }
    const Complex x = y / eq.gain;
    out.bits = demodulate_hard(std::span<const Complex>(&x, 1), qm);
    return out;
}

bool decide_block_error(std::int64_t bit_errors, std::int64_t total_bits, const McsEntry& mcs,
                        double epsilon)
{
    if (bit_errors < 0 || bit_errors > total_bits)
        throw std::invalid_argument("decide_block_error: bit_errors outside [0, total_bits]");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("decide_block_error: epsilon must be in (0, 1]");
    const auto budget = static_cast<std::int64_t>(
        std::floor(epsilon * (1.0 - mcs.code_rate()) * static_cast<double>(total_bits)));
    return bit_errors > budget;
}

std::vector<std::uint8_t> random_bits(std::int64_t count, Rng& rng)
{
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
    {
        if (i % 64 == 0)
            word = rng.bits64();
        bits[i] = static_cast<std::uint8_t>(word & 1U);
        word >>= 1;
    }
    return bits;
}

std::vector<std::uint8_t> make_codeword(const TransportBlock& tb, std::int64_t coded_bits, Rng& rng)
{
    if (static_cast<std::int64_t>(tb.bits.size()) != tb.tbs)
        throw std::invalid_argument("make_codeword: transport block length differs from tbs");
    if (tb.tbs > coded_bits)
        throw std::invalid_argument("make_codeword: tbs exceeds coded bits");
    std::vector<std::uint8_t> cw = tb.bits;
    const auto parity = random_bits(coded_bits - tb.tbs, rng);
    cw.insert(cw.end(), parity.begin(), parity.end());
    return cw;
}

ResourceGrid map_to_grid(const Allocation& alloc, std::span<const std::vector<std::uint8_t>> codewords,
                         int carrier_rb, int data_re_per_rb)
{
    check_grid_inputs(alloc, codewords, carrier_rb, data_re_per_rb);
    const int qm = mcs_lookup(alloc.mcs_index).qm;
    const auto points = constellation(qm);
    const std::size_t n_re = static_cast<std::size_t>(alloc.num_rb) * data_re_per_rb;

    ResourceGrid grid;
    grid.num_rb = carrier_rb;
    grid.data_re_per_rb = data_re_per_rb;
    grid.tx.assign(static_cast<std::size_t>(carrier_rb) * data_re_per_rb, AntennaVector{});

    const bool mu = alloc.mode == AllocationMode::MuMimo;
    const std::size_t offset = grid.re_index(alloc.start_rb, 0);
    for (std::size_t re = 0; re < n_re; ++re)
    {
        const Complex x1 = points[pack_symbol(codewords[0].data() + re * qm, qm)];
        std::optional<Complex> x2;
        if (mu)
            x2 = points[pack_symbol(codewords[1].data() + re * qm, qm)];
        grid.tx[offset + re] = precode_superpose(x1, x2, alloc);
    }
    return grid;
}

std::vector<LinkResult> transmit_slot(const Allocation& alloc,
                                      std::span<const std::vector<std::uint8_t>> codewords,
                                      std::span<const ChannelVector> channels,
                                      std::span<const NoiseSpec> noise, int carrier_rb,
                                      int data_re_per_rb, const LinkConfig& link, Rng& rng)
{
    if (channels.size() != alloc.ues.size() || noise.size() != alloc.ues.size())
        throw std::invalid_argument("transmit_slot: channels/noise must match the allocation");
    check_grid_inputs(alloc, codewords, carrier_rb, data_re_per_rb);
    if (alloc.ues.size() != (alloc.mode == AllocationMode::MuMimo ? 2U : 1U))
        throw std::domain_error("transmit_slot: allocation UE count does not match its mode");

    const McsEntry& mcs = mcs_lookup(alloc.mcs_index);
    const int qm = mcs.qm;
    const auto& table = table_for(qm);
    const std::size_t n_re = static_cast<std::size_t>(alloc.num_rb) * data_re_per_rb;
    const std::size_t n_streams = alloc.ues.size();

    std::array<std::vector<std::uint8_t>, 2> symbols;
    for (std::size_t j = 0; j < n_streams; ++j)
    {
        symbols[j].resize(n_re);
        for (std::size_t re = 0; re < n_re; ++re)
            symbols[j][re] = static_cast<std::uint8_t>(pack_symbol(codewords[j].data() + re * qm, qm));
    }

    // The precoded sum h * sum_j(alpha_j w_j x_j) collapses to sum_j c_j x_j
    // with c_j = alpha_j h w_j.
    std::vector<LinkResult> results;
    for (std::size_t k = 0; k < n_streams; ++k)
    {
        const Equalizer eq = make_equalizer(channels[k], alloc, k, noise[k].variance);
        LinkResult r;
        r.ue_id = alloc.ues[k].ue_id;
        r.total_bits = static_cast<std::int64_t>(n_re) * qm;
        r.post_sinr_db = 10.0 * std::log10(eq.post_sinr);

        if (!eq.usable)
        {
            r.bit_errors = r.total_bits;
            r.block_error = true;
            results.push_back(r);
            continue;
        }

        std::array<Complex, 2> c{};
        for (std::size_t j = 0; j < n_streams; ++j)
            c[j] = alloc.ues[j].alpha * effective_channel(channels[k], alloc.ues[j].pmi);
        const Complex to_lattice = table.scale / eq.gain;
        const double sd = noise[k].variance > 0.0 ? std::sqrt(0.5 * noise[k].variance) : 0.0;
        const Complex* points = table.points.data();
        const std::uint8_t* own = symbols[k].data();
        const std::uint8_t* other = n_streams == 2 ? symbols[1 - k].data() : nullptr;
        const Complex c_other = n_streams == 2 ? c[1 - k] : Complex{};

        std::int64_t errors = 0;
        switch (qm)
        {
        case 2:
            errors = count_bit_errors<2>(points, own, other, c[k], c_other, to_lattice, sd, n_re, rng);
            break;
        case 4:
            errors = count_bit_errors<4>(points, own, other, c[k], c_other, to_lattice, sd, n_re, rng);
            break;
        default:
            errors = count_bit_errors<6>(points, own, other, c[k], c_other, to_lattice, sd, n_re, rng);
            break;
        }
        r.bit_errors = errors;

        if (link.model == LinkModel::BoundedDistance)
            r.block_error = decide_block_error(errors, r.total_bits, mcs, link.epsilon);
        else
            r.block_error = r.post_sinr_db < sinr_threshold_db(mcs, link.threshold_margin_db);
        results.push_back(r);
    }
    return results;
}

} // namespace nrmu
