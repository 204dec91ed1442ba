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

#include "tcsim/config.h"

#include "json.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tcsim {

using Json = nlohmann::ordered_json;

FenceConfig SimConfig::fence_config() const { return fence_config(mitigation); }

FenceConfig SimConfig::fence_config(FenceVariant variant) const {
    switch (variant) {
    case FenceVariant::FenceTS:
        return FenceConfig::fence_t_s(pad_target);
    case FenceVariant::NaiveHw:
        return FenceConfig::naive_hw(pad_target);
    case FenceVariant::None:
        break;
    }
    return FenceConfig::none();
}

BenchConfig SimConfig::bench_config(std::uint64_t s) const {
    BenchConfig b;
    b.component = component;
    b.secret_count = secrets;
    b.samples_per_secret = samples;
    b.mitigation = fence_config();
    b.seed = s;
    b.noise_cycles = noise_cycles;
    b.bucket_width = bucket_width;
    b.uarch = uarch;
    b.engine = engine;
    return b;
}

void SimConfig::validate() const {
    uarch.validate();
    if (pad_target == 0)
        throw ConfigError("pad_target must be > 0");
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw ConfigError("confidence must be in (0, 1]");
    if (samples < 1)
        throw ConfigError("samples must be >= 1");
    if (slices < 2)
        throw ConfigError("overhead slices must be >= 2");
    worst_case_raw_cycles(FenceConfig::fence_t_s(pad_target), uarch, engine,
                          bench_initial_arch().sp_index);
}

namespace {

void check_keys(const Json &obj, const std::string &where,
                std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &item : obj.items()) {
        bool ok = false;
        for (std::string_view a : allowed)
            ok = ok || item.key() == a;
        if (!ok)
            throw ConfigError(where + ": unknown field '" + item.key() + "'");
    }
}

template <class T>
void read(const Json &obj, const char *key, T &out, const std::string &where) {
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

std::uint64_t read_u64(const Json &obj, const char *key, std::uint64_t fallback,
                       const std::string &where) {
    if (!obj.contains(key))
        return fallback;
    const Json &v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

void read_cache(const Json &j, CacheGeometry &g, const std::string &where) {
    check_keys(j, where,
               {"sets", "ways", "line_bytes", "hit_latency", "miss_latency",
                "writeback_latency", "clean_base_cost", "invalidate_latency"});
    g.sets = static_cast<std::uint32_t>(read_u64(j, "sets", g.sets, where));
    g.ways = static_cast<std::uint32_t>(read_u64(j, "ways", g.ways, where));
    g.line_bytes = static_cast<std::uint32_t>(read_u64(j, "line_bytes", g.line_bytes, where));
    g.hit_latency = read_u64(j, "hit_latency", g.hit_latency, where);
    g.miss_latency = read_u64(j, "miss_latency", g.miss_latency, where);
    g.writeback_latency = read_u64(j, "writeback_latency", g.writeback_latency, where);
    g.clean_base_cost = read_u64(j, "clean_base_cost", g.clean_base_cost, where);
    g.invalidate_latency = read_u64(j, "invalidate_latency", g.invalidate_latency, where);
}

Json cache_json(const CacheGeometry &g) {
    return Json{{"sets", g.sets},
                {"ways", g.ways},
                {"line_bytes", g.line_bytes},
                {"hit_latency", g.hit_latency},
                {"miss_latency", g.miss_latency},
                {"writeback_latency", g.writeback_latency},
                {"clean_base_cost", g.clean_base_cost},
                {"invalidate_latency", g.invalidate_latency}};
}

void check_version(const Json &doc) {
    if (!doc.contains("version"))
        throw ConfigError("config: missing 'version'");
    const Json &v = doc.at("version");
    long long major = -1;
    if (v.is_number_integer()) {
        major = v.get<long long>();
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            major = std::stoll(s.substr(0, s.find('.')));
        } catch (const std::exception &) {
            throw ConfigError("config: unparseable version '" + s + "'");
        }
    } else {
        throw ConfigError("config: version must be an integer or string");
    }
    if (major != kConfigVersionMajor)
        throw ConfigError("config: version " + std::to_string(major) +
                          " does not match tool major version " +
                          std::to_string(kConfigVersionMajor));
}

} // namespace

SimConfig parse_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_keys(doc, "config",
               {"version", "l1d", "l1i", "bht", "rat", "ff_clear_latency", "engine",
                "fence", "bench", "leakage", "overhead", "seed"});
    check_version(doc);

    SimConfig c;
    if (doc.contains("l1d"))
        read_cache(doc["l1d"], c.uarch.l1d, "l1d");
    if (doc.contains("l1i"))
        read_cache(doc["l1i"], c.uarch.l1i, "l1i");
    if (doc.contains("bht")) {
        const Json &j = doc["bht"];
        check_keys(j, "bht", {"index_bits", "reset_value", "invalidate_latency"});
        c.uarch.bht.index_bits = static_cast<unsigned>(
            read_u64(j, "index_bits", c.uarch.bht.index_bits, "bht"));
        const auto reset = read_u64(j, "reset_value", c.uarch.bht.reset_value, "bht");
        if (reset > 3)
            throw ConfigError("bht.reset_value must be in [0, 3]");
        c.uarch.bht.reset_value = static_cast<std::uint8_t>(reset);
        c.uarch.bht.invalidate_latency =
            read_u64(j, "invalidate_latency", c.uarch.bht.invalidate_latency, "bht");
    }
    if (doc.contains("rat")) {
        const Json &j = doc["rat"];
        check_keys(j, "rat", {"phys_count", "rename_base", "stall_penalty"});
        c.uarch.rat.phys_count =
            static_cast<unsigned>(read_u64(j, "phys_count", c.uarch.rat.phys_count, "rat"));
        c.uarch.rat.rename_base = read_u64(j, "rename_base", c.uarch.rat.rename_base, "rat");
        c.uarch.rat.stall_penalty =
            read_u64(j, "stall_penalty", c.uarch.rat.stall_penalty, "rat");
    }
    c.uarch.ff_clear_latency =
        read_u64(doc, "ff_clear_latency", c.uarch.ff_clear_latency, "config");
    if (doc.contains("engine")) {
        const Json &j = doc["engine"];
        check_keys(j, "engine", {"mispredict_penalty", "branch_latency", "csr_latency"});
        c.engine.mispredict_penalty =
            read_u64(j, "mispredict_penalty", c.engine.mispredict_penalty, "engine");
        c.engine.branch_latency = read_u64(j, "branch_latency", c.engine.branch_latency, "engine");
        c.engine.csr_latency = read_u64(j, "csr_latency", c.engine.csr_latency, "engine");
    }
    if (doc.contains("fence")) {
        const Json &j = doc["fence"];
        check_keys(j, "fence", {"pad_target"});
        c.pad_target = read_u64(j, "pad_target", c.pad_target, "fence");
    }
    if (doc.contains("bench")) {
        const Json &j = doc["bench"];
        check_keys(j, "bench",
                   {"component", "secrets", "samples", "mitigation", "noise_cycles",
                    "bucket_width"});
        std::string name;
        if (j.contains("component")) {
            read(j, "component", name, "bench");
            c.component = parse_component(name);
        }
        if (j.contains("mitigation")) {
            read(j, "mitigation", name, "bench");
            c.mitigation = parse_mitigation(name);
        }
        c.secrets = read_u64(j, "secrets", c.secrets, "bench");
        c.samples = read_u64(j, "samples", c.samples, "bench");
        c.noise_cycles = read_u64(j, "noise_cycles", c.noise_cycles, "bench");
        c.bucket_width = read_u64(j, "bucket_width", c.bucket_width, "bench");
    }
    if (doc.contains("leakage")) {
        const Json &j = doc["leakage"];
        check_keys(j, "leakage", {"trials", "confidence"});
        c.trials = read_u64(j, "trials", c.trials, "leakage");
        read(j, "confidence", c.confidence, "leakage");
    }
    if (doc.contains("overhead")) {
        const Json &j = doc["overhead"];
        check_keys(j, "overhead", {"slice_cycles", "slices", "workload"});
        c.slice_cycles = read_u64(j, "slice_cycles", c.slice_cycles, "overhead");
        c.slices = read_u64(j, "slices", c.slices, "overhead");
        if (j.contains("workload")) {
            std::string name;
            read(j, "workload", name, "overhead");
            c.workload = parse_workload(name);
        }
    }
    if (doc.contains("seed"))
        c.seed = read_u64(doc, "seed", 0, "config");

    c.validate();
    return c;
}

SimConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const SimConfig &c) {
    Json doc{{"version", kConfigVersionMajor},
             {"l1d", cache_json(c.uarch.l1d)},
             {"l1i", cache_json(c.uarch.l1i)},
             {"bht",
              {{"index_bits", c.uarch.bht.index_bits},
               {"reset_value", c.uarch.bht.reset_value},
               {"invalidate_latency", c.uarch.bht.invalidate_latency}}},
             {"rat",
              {{"phys_count", c.uarch.rat.phys_count},
               {"rename_base", c.uarch.rat.rename_base},
               {"stall_penalty", c.uarch.rat.stall_penalty}}},
             {"ff_clear_latency", c.uarch.ff_clear_latency},
             {"engine",
              {{"mispredict_penalty", c.engine.mispredict_penalty},
               {"branch_latency", c.engine.branch_latency},
               {"csr_latency", c.engine.csr_latency}}},
             {"fence", {{"pad_target", c.pad_target}}},
             {"bench",
              {{"component", std::string(to_string(c.component))},
               {"secrets", c.secrets},
               {"samples", c.samples},
               {"mitigation", std::string(to_string(c.mitigation))},
               {"noise_cycles", c.noise_cycles},
               {"bucket_width", c.bucket_width}}},
             {"leakage", {{"trials", c.trials}, {"confidence", c.confidence}}},
             {"overhead",
              {{"slice_cycles", c.slice_cycles},
               {"slices", c.slices},
               {"workload", std::string(to_string(c.workload))}}}};
    if (c.seed)
        doc["seed"] = *c.seed;
    return doc.dump(2) + "\n";
}

} // namespace tcsim
