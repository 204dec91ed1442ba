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

#include "tcsim/chanbench.h"

#include <algorithm>
#include <exception>

namespace tcsim {

std::size_t default_secret_count(Component c, const UarchConfig &cfg) {
    const std::size_t cap = component_capacity(c, cfg);
    if (c == Component::Bht)
        return std::min<std::size_t>(cap + 1, 129);
    return cap + 1;
}

std::size_t BenchConfig::effective_secret_count() const {
    return secret_count ? secret_count : default_secret_count(component, uarch);
}

void BenchConfig::validate() const {
    uarch.validate();
    mitigation.validate();
    const std::size_t s = effective_secret_count();
    if (s < 2)
        throw ConfigError("secret_count must be >= 2");
    if (s > component_capacity(component, uarch) + 1)
        throw ConfigError("secret_count " + std::to_string(s) +
                          " exceeds component capacity + 1");
    if (samples_per_secret < 1)
        throw ConfigError("samples_per_secret must be >= 1");
    worst_case_raw_cycles(mitigation, uarch, engine, bench_initial_arch().sp_index);
}

ArchState bench_initial_arch() {
    ArchState a;
    for (unsigned i = 0; i < kLogicalRegs; ++i)
        a.regs[i] = 0x0101010101010101ull * (i + 1) ^ 0x5A5A0000ull;
    a.regs[0] = 0;
    a.sp_index = 2;
    a.regs[a.sp_index] = 0x7FFF0000;
    return a;
}

namespace {

std::vector<Kernel> build_primes(const BenchConfig &cfg, std::size_t secrets) {
    std::vector<Kernel> primes;
    primes.reserve(secrets);
    for (std::size_t s = 0; s < secrets; ++s)
        primes.push_back(make_prime_kernel(cfg.component, s, cfg.uarch));
    return primes;
}

} // namespace

TrialContext::TrialContext(const BenchConfig &cfg)
    : cfg_(cfg), secrets_(cfg.effective_secret_count()),
      arch0_(bench_initial_arch()), arch_(arch0_),
      uarch_(reset_state(cfg.uarch)),
      probe_(make_probe_kernel(cfg.component, cfg.uarch)),
      primes_(build_primes(cfg, secrets_)) {}

Sample TrialContext::run_trial(std::size_t secret, Rng &rng) {
    if (secret >= secrets_)
        throw ContractViolation("secret out of range");
    arch_ = arch0_;
    execute(probe_, arch_, uarch_, cfg_.engine);
    execute(primes_[secret], arch_, uarch_, cfg_.engine);
    apply_mitigation(arch_, uarch_, cfg_.mitigation, cfg_.engine);
    if (record_)
        pre_probe_ = uarch_;
    last_probe_ = execute(probe_, arch_, uarch_, cfg_.engine);

    Cycles time = last_probe_.cycles;
    if (cfg_.noise_cycles > 0)
        time += std::uniform_int_distribution<Cycles>(0, cfg_.noise_cycles)(rng);
    return {secret, time};
}

std::vector<std::size_t> trial_order(const BenchConfig &cfg) {
    const std::size_t secrets = cfg.effective_secret_count();
    std::vector<std::size_t> order;
    order.reserve(secrets * cfg.samples_per_secret);
    for (std::size_t s = 0; s < secrets; ++s)
        order.insert(order.end(), cfg.samples_per_secret, s);
    Rng rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

namespace {

ChannelMatrix run_chunk(const BenchConfig &cfg,
                        const std::vector<std::size_t> &order, std::size_t chunk) {
    const std::size_t secrets = cfg.effective_secret_count();
    std::seed_seq seq{cfg.seed, std::uint64_t{chunk} + 1};
    Rng rng(seq);
    TrialContext ctx(cfg);
    ChannelMatrix m(secrets);
    const std::size_t begin = chunk * kTrialsPerChunk;
    const std::size_t end = std::min(order.size(), begin + kTrialsPerChunk);
    for (std::size_t i = begin; i < end; ++i) {
        const Sample s = ctx.run_trial(order[i], rng);
        m.add(s.secret, s.time);
    }
    return m;
}

ChannelMatrix assemble(const BenchConfig &cfg, std::vector<ChannelMatrix> &parts) {
    ChannelMatrix m(cfg.effective_secret_count());
    for (const ChannelMatrix &p : parts)
        m.merge(p);
    return m.bucketed(cfg.bucket_width);
}

} // namespace

ChannelMatrix run_bench(const BenchConfig &cfg) {
    cfg.validate();
    const auto order = trial_order(cfg);
    const std::size_t chunks = (order.size() + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<ChannelMatrix> parts(chunks);
    std::vector<std::exception_ptr> errors(chunks);

#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < chunks; ++c) {
        try {
            parts[c] = run_chunk(cfg, order, c);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return assemble(cfg, parts);
}

ChannelMatrix run_bench_serial(const BenchConfig &cfg) {
    cfg.validate();
    const auto order = trial_order(cfg);
    const std::size_t chunks = (order.size() + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<ChannelMatrix> parts;
    parts.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c)
        parts.push_back(run_chunk(cfg, order, c));
    return assemble(cfg, parts);
}

} // namespace tcsim
