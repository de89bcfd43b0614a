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

#include "nrmu/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace nrmu::cli
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why)
{
    throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "' (" +
                      std::string(why) + ")");
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    const std::string_view v = trim(text);
    T out{};
    if constexpr (std::is_floating_point_v<T>)
    {
        // std::from_chars for double is unavailable on older libstdc++.
        const std::string s(v);
        char* end = nullptr;
        errno = 0;
        const double d = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(d))
            bad_value(key, text, "expected a finite number");
        out = static_cast<T>(d);
    }
    else
    {
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
            bad_value(key, text, "expected an integer");
    }
    return out;
}

std::vector<std::string_view> split_list(std::string_view key, std::string_view text)
{
    std::string_view v = trim(text);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']')
        v = trim(v.substr(1, v.size() - 2));
    else if (!v.empty() && (v.front() == '[' || v.back() == ']'))
        bad_value(key, text, "unbalanced brackets");

    std::vector<std::string_view> items;
    if (v.empty())
        return items;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
        if (item.empty())
            bad_value(key, text, "empty list element");
        items.push_back(item);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return items;
}

// "a:b" or "a:b:step" expands to an inclusive range; anything else is a list.
std::vector<double> parse_real_range_or_list(std::string_view key, std::string_view text)
{
    const std::string_view v = trim(text);
    if (v.find(':') != std::string_view::npos && v.find('[') == std::string_view::npos)
    {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (true)
        {
            const auto colon = v.find(':', start);
            parts.push_back(v.substr(start, colon == std::string_view::npos ? v.npos : colon - start));
            if (colon == std::string_view::npos)
                break;
            start = colon + 1;
        }
        if (parts.size() < 2 || parts.size() > 3)
            bad_value(key, text, "expected MIN:MAX or MIN:MAX:STEP");
        const double lo = parse_number<double>(key, parts[0]);
        const double hi = parse_number<double>(key, parts[1]);
        const double step = parts.size() == 3 ? parse_number<double>(key, parts[2]) : 1.0;
        if (step <= 0.0 || hi < lo)
            bad_value(key, text, "need MIN <= MAX and STEP > 0");
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (n > 100000)
            bad_value(key, text, "range too long");
        std::vector<double> out;
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(lo + static_cast<double>(i) * step);
        return out;
    }
    std::vector<double> out;
    for (auto item : split_list(key, text))
        out.push_back(parse_number<double>(key, item));
    return out;
}

std::vector<int> parse_int_range_or_list(std::string_view key, std::string_view text)
{
    std::vector<int> out;
    for (double d : parse_real_range_or_list(key, text))
    {
        if (d != std::floor(d))
            bad_value(key, text, "expected integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

ChannelVector parse_channel(std::string_view key, std::string_view text, int ue_id)
{
    const auto items = split_list(key, text);
    if (items.size() != 4)
        bad_value(key, text, "expected [re0, im0, re1, im1]");
    ChannelVector h;
    h.ue_id = ue_id;
    h.entries[0] = {parse_number<double>(key, items[0]), parse_number<double>(key, items[1])};
    h.entries[1] = {parse_number<double>(key, items[2]), parse_number<double>(key, items[3])};
    return h;
}

SchedulerMode parse_scheduler(std::string_view key, std::string_view text)
{
    const auto v = trim(text);
    if (v == "mumimo")
        return SchedulerMode::MuMimoEnabled;
    if (v == "pf")
        return SchedulerMode::ProportionalFairOnly;
    if (v == "su")
        return SchedulerMode::SingleUserOnly;
    bad_value(key, text, "expected mumimo, pf or su");
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw RuntimeError("cannot open '" + path.string() + "' for writing");
    f << content;
    f.close();
    if (!f)
        throw RuntimeError("failed writing '" + path.string() + "'");
}

} // namespace

std::optional<ExperimentPreset> find_preset(std::string_view id)
{
    using SM = SchedulerMode;
    if (id == "bler-vs-snr")
        return ExperimentPreset{PresetName::BlerVsSnr, "bler-vs-snr", {SM::MuMimoEnabled}, 106, false};
    if (id == "rate-vs-snr")
        return ExperimentPreset{PresetName::RateVsSnr, "rate-vs-snr", {SM::MuMimoEnabled}, 106, false};
    if (id == "mu-vs-pf")
        return ExperimentPreset{PresetName::MuVsPf, "mu-vs-pf", {SM::MuMimoEnabled, SM::ProportionalFairOnly}, 106,
                                false};
    if (id == "practical")
        return ExperimentPreset{PresetName::PracticalProfile, "practical", {SM::MuMimoEnabled, SM::SingleUserOnly},
                                52, true};
    return std::nullopt;
}

void apply_preset(const ExperimentPreset& preset, RunRequest& req)
{
    req.preset = preset;
    req.modes = preset.modes;
    req.sim.scheduler_mode = preset.modes.front();
    req.sim.num_rb = preset.num_rb;
}

void set_key(RunRequest& req, std::string_view key, std::string_view value)
{
    auto& s = req.sim;
    if (key == "num_rb")
        s.num_rb = parse_number<int>(key, value);
    else if (key == "scs_khz")
        s.scs_khz = parse_number<int>(key, value);
    else if (key == "snr_db")
        s.snr_grid_db = parse_real_range_or_list(key, value);
    else if (key == "mcs")
        s.mcs_list = parse_int_range_or_list(key, value);
    else if (key == "channel")
    {
        const auto v = trim(value);
        if (v == "ideal")
            s.channel_mode = ChannelMode::Ideal;
        else if (v == "rayleigh")
            s.channel_mode = ChannelMode::Rayleigh;
        else if (v == "forced")
            s.channel_mode = ChannelMode::Forced;
        else
            bad_value(key, value, "expected ideal, rayleigh or forced");
    }
    else if (key == "h1")
        s.forced_h1 = parse_channel(key, value, 0);
    else if (key == "h2")
        s.forced_h2 = parse_channel(key, value, 1);
    else if (key == "scheduler")
    {
        s.scheduler_mode = parse_scheduler(key, value);
        req.modes = {s.scheduler_mode};
    }
    else if (key == "tb_per_point")
        s.tb_per_point = parse_number<int>(key, value);
    else if (key == "seed")
        s.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "epsilon")
        s.epsilon = parse_number<double>(key, value);
    else if (key == "data_re_per_rb")
        s.data_re_per_rb = parse_number<int>(key, value);
    else if (key == "link_model")
    {
        const auto v = trim(value);
        if (v == "bdd")
            s.link_model = LinkModel::BoundedDistance;
        else if (v == "threshold")
            s.link_model = LinkModel::Threshold;
        else
            bad_value(key, value, "expected bdd or threshold");
    }
    else if (key == "threshold_margin_db")
        s.threshold_margin_db = parse_number<double>(key, value);
    else if (key == "drop_slots")
        s.drop_slots = parse_number<int>(key, value);
    else if (key == "csirs_pilots")
        s.csirs_pilots = parse_number<int>(key, value);
    else if (key == "max_harq_attempts")
        s.max_harq_attempts = parse_number<int>(key, value);
    else if (key == "workers")
        s.workers = parse_number<int>(key, value);
    else if (key == "out")
    {
        const auto v = trim(value);
        if (v.empty())
            bad_value(key, value, "empty path");
        req.out = std::string(v);
    }
    else
        throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(std::string_view text, RunRequest& req)
{
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": missing key");
        set_key(req, key, trim(line.substr(eq + 1)));
    }
}

void apply_config_file(const std::filesystem::path& path, RunRequest& req)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw RuntimeError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    apply_config_text(ss.str(), req);
}

void finalize(RunRequest& req)
{
    if (req.preset && req.preset->forces_num_rb && req.sim.num_rb != req.preset->num_rb)
        throw ConfigError("invalid value for 'num_rb': preset '" + std::string(req.preset->id) + "' requires " +
                          std::to_string(req.preset->num_rb));
    try
    {
        validate(req.sim);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

RunRequest parse_args(std::span<const std::string> args)
{
    CLI::App app{"Two-user MU-MIMO PDSCH link-level simulator", "nrmu_sim"};
    std::string config, preset, snr, mcs, channel, sched, rb, seed, tb, out, link, epsilon, workers;
    app.add_option("--config", config, "flat key = value configuration file");
    app.add_option("--preset", preset, "bler-vs-snr | rate-vs-snr | mu-vs-pf | practical");
    auto* o_snr = app.add_option("--snr", snr, "SNR grid MIN:MAX:STEP in dB");
    auto* o_mcs = app.add_option("--mcs", mcs, "MCS list, e.g. 10,13,16 or 10:28");
    auto* o_channel = app.add_option("--channel", channel, "ideal | rayleigh | forced");
    auto* o_sched = app.add_option("--sched", sched, "mumimo | pf | su");
    auto* o_rb = app.add_option("--rb", rb, "number of resource blocks");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_tb = app.add_option("--tb-per-point", tb, "new transport blocks per UE per grid point");
    auto* o_out = app.add_option("--out", out, "CSV output path");
    auto* o_link = app.add_option("--link-model", link, "bdd | threshold");
    auto* o_eps = app.add_option("--epsilon", epsilon, "bit-error budget fraction of the redundancy");
    auto* o_workers = app.add_option("--workers", workers, "parallel workers (0 = all cores)");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    app.parse(argv_rev);

    RunRequest req;
    if (!preset.empty())
    {
        const auto p = find_preset(preset);
        if (!p)
            throw ConfigError("unknown preset '" + preset + "'");
        apply_preset(*p, req);
    }
    if (!config.empty())
        apply_config_file(config, req);

    const std::pair<CLI::Option*, std::pair<const char*, std::string*>> flags[] = {
        {o_snr, {"snr_db", &snr}},        {o_mcs, {"mcs", &mcs}},
        {o_channel, {"channel", &channel}}, {o_sched, {"scheduler", &sched}},
        {o_rb, {"num_rb", &rb}},          {o_seed, {"seed", &seed}},
        {o_tb, {"tb_per_point", &tb}},    {o_out, {"out", &out}},
        {o_link, {"link_model", &link}},  {o_eps, {"epsilon", &epsilon}},
        {o_workers, {"workers", &workers}},
    };
    for (const auto& [opt, kv] : flags)
        if (opt->count() > 0)
            set_key(req, kv.first, *kv.second);

    finalize(req);
    return req;
}

std::string format_csv(std::span<const RunMetrics> runs, double slot_duration_s)
{
    std::string csv = "mode,snr_db,mcs,ue,bler,bler_avg,throughput_bps,slots,bits\n";
    for (const auto& run : runs)
    {
        const std::string mode(to_string(run.mode));
        for (const auto& p : run.points)
        {
            const std::string prefix = mode + "," + fmt("%g", p.snr_db) + "," + std::to_string(p.mcs_index) + ",";
            const std::string avg = fmt("%.6f", p.bler_avg());
            const std::string slots = std::to_string(p.slots_elapsed);
            for (std::size_t k = 0; k < p.ues.size(); ++k)
            {
                const auto& u = p.ues[k];
                csv += prefix + std::to_string(u.ue_id) + "," + fmt("%.6f", u.bler()) + "," + avg + "," +
                       fmt("%.1f", p.ue_throughput_bps(k, slot_duration_s)) + "," + slots + "," +
                       std::to_string(u.bits_acked) + "\n";
            }
            csv += prefix + "all," + fmt("%.6f", p.bler_max()) + "," + avg + "," + fmt("%.1f", p.throughput_bps) +
                   "," + slots + "," + std::to_string(p.bits_delivered) + "\n";
        }
    }
    return csv;
}

std::filesystem::path plot_script_path(const std::filesystem::path& csv_path)
{
    auto p = csv_path;
    p.replace_extension();
    p += ".plot.py";
    return p;
}

std::string plot_script(const std::filesystem::path& csv_path, std::optional<PresetName> preset)
{
    std::string kind = "bler";
    if (preset)
    {
        switch (*preset)
        {
        case PresetName::BlerVsSnr:
            kind = "bler";
            break;
        case PresetName::RateVsSnr:
            kind = "rate";
            break;
        case PresetName::MuVsPf:
            kind = "envelope";
            break;
        case PresetName::PracticalProfile:
            kind = "per_mcs";
            break;
        }
    }

    std::string s;
    s += "#!/usr/bin/env python3\n";
    s += "# Generated by nrmu_sim. Usage: python3 " + plot_script_path(csv_path).filename().string() + "\n";
    s += "import csv, os, sys\n";
    s += "from collections import defaultdict\n";
    s += "import matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
    s += "HERE = os.path.dirname(os.path.abspath(__file__))\n";
    s += "CSV = os.path.join(HERE, " + std::string("'") + csv_path.filename().string() + "')\n";
    s += "KIND = '" + kind + "'\n\n";
    s += R"PY(rows = [r for r in csv.DictReader(open(CSV)) if r['ue'] == 'all']
modes = sorted({r['mode'] for r in rows})
fig, ax = plt.subplots(figsize=(7, 4.5))

if KIND in ('bler', 'rate'):
    col = 'bler_avg' if KIND == 'bler' else 'throughput_bps'
    for mode in modes:
        series = defaultdict(list)
        for r in rows:
            if r['mode'] == mode:
                series[int(r['mcs'])].append((float(r['snr_db']), float(r[col])))
        for mcs, pts in sorted(series.items()):
            pts.sort()
            y = [v if KIND == 'bler' else v / 1e6 for _, v in pts]
            ax.plot([p[0] for p in pts], y, marker='.', label=f'{mode} MCS {mcs}')
    if KIND == 'bler':
        ax.set_yscale('log')
        ax.axhline(0.1, color='k', ls='--', lw=0.8)
        ax.set_ylabel('average BLER')
    else:
        ax.set_ylabel('total rate [Mbit/s]')
    ax.set_xlabel('SNR [dB]')
elif KIND == 'envelope':
    for mode in modes:
        best = defaultdict(float)
        for r in rows:
            if r['mode'] == mode and float(r['bler']) < 0.1:
                snr = float(r['snr_db'])
                best[snr] = max(best[snr], float(r['throughput_bps']) / 1e6)
        snrs = sorted({float(r['snr_db']) for r in rows if r['mode'] == mode})
        ax.plot(snrs, [best.get(x, 0.0) for x in snrs], marker='o', label=mode)
    ax.set_xlabel('SNR [dB]')
    ax.set_ylabel('achievable rate [Mbit/s]')
else:
    top = max(float(r['snr_db']) for r in rows)
    for mode in modes:
        pts = sorted((int(r['mcs']), float(r['throughput_bps']) / 1e6)
                     for r in rows if r['mode'] == mode and float(r['snr_db']) == top)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker='o', label=f'{mode} total')
    ax.set_xlabel('MCS index')
    ax.set_ylabel(f'rate at {top:g} dB [Mbit/s]')

ax.grid(True, which='both', alpha=0.3)
ax.legend(fontsize='small', ncol=2)
fig.tight_layout()
out = os.path.splitext(CSV)[0] + '.png'
fig.savefig(out, dpi=150)
print('wrote', out)
)PY";
    return s;
}

int run(const RunRequest& req, std::ostream& log)
{
    const auto out = req.out;
    const auto parent = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    if (!std::filesystem::is_directory(parent, ec))
    {
        log << "error: output directory '" << parent.string() << "' does not exist\n";
        return 2;
    }

    const auto script = plot_script_path(out);
    auto tmp_csv = out;
    tmp_csv += ".tmp";
    auto tmp_script = script;
    tmp_script += ".tmp";

    try
    {
        std::vector<RunMetrics> runs;
        for (const auto mode : req.modes)
        {
            SimConfig cfg = req.sim;
            cfg.scheduler_mode = mode;
            runs.push_back(run_sweep(cfg));

            const auto env = achievable_rate_envelope(runs.back(), 0.1);
            const double peak = env.empty() ? 0.0 : *std::max_element(env.begin(), env.end());
            log << "mode=" << to_string(mode) << " points=" << runs.back().points.size()
                << " peak_reliable_rate_mbps=" << fmt("%.2f", peak / 1e6) << "\n";
        }

        write_file(tmp_csv, format_csv(runs, req.sim.slot_duration_s()));
        write_file(tmp_script, plot_script(out, req.preset ? std::optional(req.preset->name) : std::nullopt));
        std::filesystem::rename(tmp_csv, out);
        std::filesystem::rename(tmp_script, script);
    }
    catch (const std::exception& e)
    {
        std::filesystem::remove(tmp_csv, ec);
        std::filesystem::remove(tmp_script, ec);
        std::filesystem::remove(out, ec);
        std::filesystem::remove(script, ec);
        log << "error: " << e.what() << "\n";
        return 2;
    }

    log << "wrote " << out.string() << " and " << script.string() << "\n";
    return 0;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);

    RunRequest req;
    try
    {
        req = parse_args(args);
    }
    catch (const CLI::CallForHelp&)
    {
        out << "usage: nrmu_sim [--config PATH] [--preset NAME] [--snr MIN:MAX:STEP] [--mcs LIST]\n"
               "                [--channel ideal|rayleigh|forced] [--sched mumimo|pf|su] [--rb N]\n"
               "                [--seed N] [--tb-per-point N] [--out PATH] [--link-model bdd|threshold]\n"
               "                [--epsilon X] [--workers N]\n";
        return 0;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const RuntimeError& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return run(req, err);
}

} // namespace nrmu::cli
