/*
 * SPDX-FileCopyrightText: Copyright 2026 The tcsim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tcsim/cli.h"

#include "tcsim/config.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#ifndef TCSIM_VERSION
#define TCSIM_VERSION "0.0.0"
#endif

namespace tcsim {

using Json = nlohmann::ordered_json;

std::string render_pgm(const ChannelMatrix &m) {
    const std::size_t w = m.secret_count(), h = m.bin_count();
    if (w == 0 || h == 0)
        throw ConfigError("cannot render an empty matrix");
    std::uint64_t peak = 0;
    for (std::uint64_t c : m.counts())
        peak = std::max(peak, c);

    std::string img = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    const std::size_t header = img.size();
    img.resize(header + w * h);
    for (std::size_t row = 0; row < h; ++row) {
        for (std::size_t s = 0; s < w; ++s) {
            const std::uint64_t c = m.count(s, row);
            // Round half up in integer arithmetic.
            const std::uint64_t grey = (510 * c + peak) / (2 * peak);
            img[header + row * w + s] = static_cast<char>(static_cast<unsigned char>(grey));
        }
    }
    return img;
}

void write_file_atomically(const std::filesystem::path &path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw ConfigError("cannot write '" + tmp.string() + "'");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::filesystem::remove(tmp);
            throw ConfigError("cannot write '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

namespace {

// Flag values as given; only those actually present override the config.
struct Flags {
    std::string config;
    std::string component;
    std::string mitigation;
    std::string workload;
    std::size_t secrets = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    Cycles pad = 0;
    Cycles slice = 0;
    std::size_t slices = 0;
    std::size_t trials = 0;
    double confidence = 0.0;
    Cycles noise = 0;
    Cycles bucket = 0;
    std::string out;
    std::string in;
    std::vector<Cycles> sweep;
};

bool given(const CLI::App *cmd, const char *name) {
    const CLI::Option *opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

SimConfig base_config(const CLI::App *cmd, const Flags &f) {
    if (given(cmd, "--config"))
        return load_config(f.config);
    if (const char *env = std::getenv("TCSIM_CONFIG"); env && *env)
        return load_config(env);
    return SimConfig{};
}

SimConfig resolve(const CLI::App *cmd, const Flags &f) {
    SimConfig c = base_config(cmd, f);
    if (given(cmd, "--component"))
        c.component = parse_component(f.component);
    if (given(cmd, "--mitigation"))
        c.mitigation = parse_mitigation(f.mitigation);
    if (given(cmd, "--workload"))
        c.workload = parse_workload(f.workload);
    if (given(cmd, "--secrets"))
        c.secrets = f.secrets;
    if (given(cmd, "--samples"))
        c.samples = f.samples;
    if (given(cmd, "--seed"))
        c.seed = f.seed;
    if (given(cmd, "--pad"))
        c.pad_target = f.pad;
    if (given(cmd, "--slice"))
        c.slice_cycles = f.slice;
    if (given(cmd, "--slices"))
        c.slices = f.slices;
    if (given(cmd, "--trials"))
        c.trials = f.trials;
    if (given(cmd, "--confidence"))
        c.confidence = f.confidence;
    if (given(cmd, "--noise"))
        c.noise_cycles = f.noise;
    if (given(cmd, "--bucket"))
        c.bucket_width = f.bucket;
    c.validate();
    return c;
}

std::uint64_t seed_or_draw(const SimConfig &c, std::ostream &err) {
    if (c.seed)
        return *c.seed;
    std::random_device rd;
    const std::uint64_t s = (std::uint64_t{rd()} << 32) | rd();
    err << "seed: " << s << "\n";
    return s;
}

ChannelMatrix load_matrix(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open matrix '" + path + "'");
    return read_matrix_csv(in);
}

void emit(const std::string &path, std::string_view content, std::ostream &out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_file_atomically(path, content);
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

int cmd_channel(const CLI::App *cmd, const Flags &f, std::ostream &out, std::ostream &err) {
    const SimConfig c = resolve(cmd, f);
    const std::uint64_t seed = seed_or_draw(c, err);
    const BenchConfig bench = c.bench_config(seed);
    const ChannelMatrix m = run_bench(bench);
    emit(f.out, matrix_csv(m), out);

    std::ostream &summary = (f.out.empty() || f.out == "-") ? err : out;
    summary << "channel component=" << to_string(c.component)
            << " mitigation=" << to_string(c.mitigation)
            << " secrets=" << m.secret_count() << " samples_per_secret=" << c.samples
            << " seed=" << seed << " bins=" << m.bin_count();
    const auto &bins = m.time_bins();
    if (m.nonzero_columns() == 1)
        summary << " spy_time=constant(" << bins.front() << ")";
    else
        summary << " spy_time=" << bins.front() << ".." << bins.back();
    summary << "\n";
    return kExitOk;
}

int cmd_analyze(const CLI::App *cmd, const Flags &f, std::ostream &out, std::ostream &err) {
    const SimConfig c = resolve(cmd, f);
    const ChannelMatrix m = load_matrix(f.in);
    const std::uint64_t seed = seed_or_draw(c, err);
    const LeakageReport r = detect(m, c.trials, c.confidence, seed);
    const Json j{{"mi_millibits", r.mi_millibits},
                 {"m0_millibits", r.m0_millibits},
                 {"trials", r.trials},
                 {"confidence", r.confidence},
                 {"leaky", r.leaky},
                 {"sample_count", r.sample_count}};
    out << j.dump(2) << "\n";
    return r.leaky ? kExitLeaky : kExitOk;
}

Json overhead_json(const OverheadReport &r) {
    return Json{{"baseline_cycles", r.baseline_cycles},
                {"mitigated_cycles", r.mitigated_cycles},
                {"direct_cost_cycles", r.direct_cost_cycles},
                {"indirect_cost_cycles", r.indirect_cost_cycles},
                {"slowdown_percent", r.slowdown_percent}};
}

int cmd_overhead(const CLI::App *cmd, const Flags &f, std::ostream &out, std::ostream &err) {
    SimConfig c = resolve(cmd, f);
    // Overhead is about the fence; default to it unless asked otherwise.
    if (!given(cmd, "--mitigation"))
        c.mitigation = FenceVariant::FenceTS;
    const std::uint64_t seed = c.seed.value_or(1);
    const Workload w = make_workload(c.workload, c.uarch, seed);
    const FenceConfig fence = c.fence_config();

    if (!f.sweep.empty()) {
        std::ostringstream csv;
        csv << "slice_cycles,baseline_cycles,mitigated_cycles,direct_cost_cycles,"
               "indirect_cost_cycles,slowdown_percent\n";
        for (Cycles slice : f.sweep) {
            const OverheadReport r = run_overhead(w, slice, fence, c.slices, c.uarch, c.engine);
            csv << slice << ',' << r.baseline_cycles << ',' << r.mitigated_cycles << ','
                << r.direct_cost_cycles << ',' << r.indirect_cost_cycles << ','
                << fixed(r.slowdown_percent, 6) << '\n';
        }
        emit(f.out, csv.str(), out);
        return kExitOk;
    }

    const OverheadReport r = run_overhead(w, c.slice_cycles, fence, c.slices, c.uarch, c.engine);
    emit(f.out, overhead_json(r).dump(2) + "\n", out);
    err << "overhead workload=" << w.name << " mitigation=" << to_string(c.mitigation)
        << " slice=" << c.slice_cycles << " pad=" << c.pad_target << " fences=" << r.fences
        << " direct_cost_percent=" << fixed(r.direct_cost_percent(), 4) << "\n";
    return kExitOk;
}

int cmd_heatmap(const CLI::App *cmd, const Flags &f, std::ostream &out) {
    ChannelMatrix m = load_matrix(f.in);
    if (given(cmd, "--bucket"))
        m = m.bucketed(f.bucket);
    emit(f.out, render_pgm(m), out);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Time-protection fence simulator", "tcsim"};
    app.set_version_flag("--version", std::string("tcsim ") + TCSIM_VERSION);
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App *cmd) {
        cmd->add_option("--config", f.config, "JSON config file (default: $TCSIM_CONFIG)");
        cmd->add_option("--seed", f.seed, "RNG seed (drawn from entropy and printed if omitted)");
        cmd->add_option("--pad", f.pad, "fence pad target in cycles");
    };

    CLI::App *channel = app.add_subcommand("channel", "measure a channel matrix");
    common(channel);
    channel->add_option("--component", f.component, "l1d, l1i, bht or rat");
    channel->add_option("--mitigation", f.mitigation, "none, fence.t.s or naive");
    channel->add_option("--secrets", f.secrets, "number of secret values");
    channel->add_option("--samples", f.samples, "samples per secret");
    channel->add_option("--noise", f.noise, "uniform jitter bound in cycles");
    channel->add_option("--bucket", f.bucket, "time bucket width in cycles");
    channel->add_option("--out", f.out, "CSV output (default: stdout)");

    CLI::App *analyze = app.add_subcommand("analyze", "mutual information and leak verdict");
    common(analyze);
    analyze->add_option("matrix", f.in, "channel matrix CSV")->required();
    analyze->add_option("--trials", f.trials, "channel-less resampling trials");
    analyze->add_option("--confidence", f.confidence, "quantile of the resampled MIs");

    CLI::App *overhead = app.add_subcommand("overhead", "context-switch fence overhead");
    common(overhead);
    overhead->add_option("--workload", f.workload,
                         "pointer_chase, streaming, branch_heavy or mixed");
    overhead->add_option("--mitigation", f.mitigation, "none, fence.t.s or naive");
    overhead->add_option("--slice", f.slice, "time slice in cycles");
    overhead->add_option("--slices", f.slices, "foreground slices to run");
    overhead->add_option("--sweep", f.sweep, "comma-separated slice lengths; CSV output")
        ->delimiter(',');
    overhead->add_option("--out", f.out, "output file (default: stdout)");

    CLI::App *heatmap = app.add_subcommand("heatmap", "render a channel matrix as PGM");
    heatmap->add_option("matrix", f.in, "channel matrix CSV")->required();
    heatmap->add_option("--bucket", f.bucket, "time bucket width in cycles");
    heatmap->add_option("--out", f.out, "PGM output (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (channel->parsed())
            return cmd_channel(channel, f, out, err);
        if (analyze->parsed())
            return cmd_analyze(analyze, f, out, err);
        if (overhead->parsed())
            return cmd_overhead(overhead, f, out, err);
        if (heatmap->parsed())
            return cmd_heatmap(heatmap, f, out);
    } catch (const PadOverrun &e) {
        err << "error: " << e.what() << "\n";
        return kExitPadOverrun;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace tcsim
