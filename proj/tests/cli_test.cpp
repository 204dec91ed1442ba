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

#include <gtest/gtest.h>

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace tcsim {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "tcsim");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path &p, const std::string &text) {
    std::ofstream(p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("tcsim-cli-" + std::to_string(rd()));
        fs::create_directories(dir_);
        unsetenv("TCSIM_CONFIG");
    }
    void TearDown() override {
        unsetenv("TCSIM_CONFIG");
        fs::remove_all(dir_);
    }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(Cli, ChannelWritesCsvAndSummary) {
    const auto r = run({"channel", "--component", "l1d", "--mitigation", "none", "--seed", "42",
                        "--samples", "20", "--out", path("m.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(path("m.csv"));
    EXPECT_EQ(csv.rfind("secret,time_cycles,count\n", 0), 0u);
    EXPECT_NE(r.out.find("component=l1d"), std::string::npos);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
    EXPECT_TRUE(r.err.empty());
    // No temporary left behind.
    EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator()), 1);
}

TEST_F(Cli, FencedBhtReportsConstantTime) {
    const auto r = run({"channel", "--component", "bht", "--mitigation", "fence.t.s",
                        "--samples", "5", "--seed", "1", "--out", path("b.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("spy_time=constant("), std::string::npos) << r.out;
}

TEST_F(Cli, SameSeedSameBytes) {
    for (const char *comp : {"l1d", "bht", "rat"}) {
        run({"channel", "--component", comp, "--seed", "9", "--samples", "30", "--noise", "3",
             "--out", path("a.csv")});
        run({"channel", "--component", comp, "--seed", "9", "--samples", "30", "--noise", "3",
             "--out", path("b.csv")});
        EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv"))) << comp;
    }
    const auto a1 = run({"analyze", path("a.csv"), "--seed", "4"});
    const auto a2 = run({"analyze", path("a.csv"), "--seed", "4"});
    EXPECT_EQ(a1.out, a2.out);
}

TEST_F(Cli, MissingSeedIsDrawnAndPrinted) {
    const auto r = run({"channel", "--component", "rat", "--samples", "2", "--out", path("r.csv")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.err.rfind("seed: ", 0), 0u) << r.err;
    const std::string seed = r.err.substr(6, r.err.find('\n') - 6);
    run({"channel", "--component", "rat", "--samples", "2", "--seed", seed, "--out",
         path("s.csv")});
    EXPECT_EQ(slurp(path("r.csv")), slurp(path("s.csv")));
}

TEST_F(Cli, AnalyzeIdentityFixture) {
    spit(path("id.csv"), "secret,time_cycles,count\n0,10,5\n1,11,5\n2,12,5\n3,13,5\n");
    const auto r = run({"analyze", path("id.csv"), "--seed", "1"});
    EXPECT_EQ(r.code, kExitLeaky);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["mi_millibits"].get<double>(), 2000.0, 1e-9);
    EXPECT_TRUE(j["leaky"].get<bool>());
}

TEST_F(Cli, AnalyzeConstantFixture) {
    spit(path("c.csv"), "secret,time_cycles,count\n0,10,5\n1,10,5\n2,10,5\n");
    const auto r = run({"analyze", path("c.csv"), "--seed", "1"});
    EXPECT_EQ(r.code, kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["leaky"].get<bool>());
}

TEST_F(Cli, AnalyzeReportKeys) {
    spit(path("c.csv"), "secret,time_cycles,count\n0,10,5\n1,10,5\n");
    const auto j = nlohmann::json::parse(run({"analyze", path("c.csv"), "--seed", "1",
                                              "--trials", "7", "--confidence", "0.5"}).out);
    std::vector<std::string> keys;
    for (const auto &item : j.items())
        keys.push_back(item.key());
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(keys, (std::vector<std::string>{"confidence", "leaky", "m0_millibits",
                                              "mi_millibits", "sample_count", "trials"}));
    EXPECT_EQ(j["trials"].get<int>(), 7);
    EXPECT_EQ(j["confidence"].get<double>(), 0.5);
    EXPECT_EQ(j["sample_count"].get<int>(), 10);
}

TEST_F(Cli, UnmitigatedChannelIsLeaky) {
    run({"channel", "--component", "l1d", "--seed", "42", "--samples", "50", "--out",
         path("l.csv")});
    EXPECT_EQ(run({"analyze", path("l.csv"), "--seed", "1"}).code, kExitLeaky);
}

TEST_F(Cli, MalformedCsvNamesTheLine) {
    spit(path("bad.csv"), "secret,time_cycles,count\n0,10,5\n1,oops,5\n");
    const auto r = run({"analyze", path("bad.csv"), "--seed", "1"});
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, RoundTripKeepsCounts) {
    run({"channel", "--component", "bht", "--seed", "5", "--samples", "17", "--secrets", "9",
         "--out", path("m.csv")});
    std::ifstream in(path("m.csv"));
    const ChannelMatrix m = read_matrix_csv(in);
    EXPECT_EQ(m.secret_count(), 9u);
    EXPECT_EQ(m.total_samples(), 9u * 17u);
    const auto j = nlohmann::json::parse(run({"analyze", path("m.csv"), "--seed", "1"}).out);
    EXPECT_EQ(j["sample_count"].get<std::uint64_t>(), 9u * 17u);
}

TEST_F(Cli, ErrorsMapToExitCodes) {
    EXPECT_EQ(run({"channel", "--component", "l3", "--seed", "1"}).code, kExitConfig);
    EXPECT_EQ(run({"channel", "--bogus"}).code, kExitConfig);
    EXPECT_EQ(run({}).code, kExitConfig);
    EXPECT_EQ(run({"channel", "--component", "l1d", "--mitigation", "fence.t.s", "--pad", "500",
                   "--seed", "1", "--samples", "1", "--out", path("x.csv")})
                  .code,
              kExitPadOverrun);
    EXPECT_FALSE(fs::exists(path("x.csv")));
    EXPECT_EQ(run({"analyze", path("missing.csv")}).code, kExitConfig);
    EXPECT_EQ(run({"overhead", "--slice", "1000", "--seed", "1"}).code, kExitConfig);
}

TEST_F(Cli, ConfigFileAndEnvFallback) {
    spit(path("cfg.json"), R"({"version": 1, "bench": {"component": "rat", "samples": 3}})");
    auto r = run({"channel", "--config", path("cfg.json"), "--seed", "1", "--out", path("a.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("component=rat"), std::string::npos);
    EXPECT_NE(r.out.find("samples_per_secret=3"), std::string::npos);

    setenv("TCSIM_CONFIG", path("cfg.json").c_str(), 1);
    r = run({"channel", "--seed", "1", "--samples", "2", "--out", path("b.csv")});
    EXPECT_NE(r.out.find("component=rat"), std::string::npos);
    EXPECT_NE(r.out.find("samples_per_secret=2"), std::string::npos); // flag beats file

    spit(path("bad.json"), R"({"version": 1, "extra": 0})");
    EXPECT_EQ(run({"channel", "--config", path("bad.json"), "--seed", "1"}).code, kExitConfig);
}

TEST_F(Cli, OverheadJsonAndSweep) {
    const auto r = run({"overhead", "--workload", "streaming", "--slice", "1000000", "--pad",
                        "1500", "--slices", "3", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::ordered_json::parse(r.out);
    std::vector<std::string> keys;
    for (const auto &item : j.items())
        keys.push_back(item.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"baseline_cycles", "mitigated_cycles",
                                              "direct_cost_cycles", "indirect_cost_cycles",
                                              "slowdown_percent"}));
    EXPECT_EQ(j["direct_cost_cycles"].get<int>(), 2 * 1500);

    const auto s = run({"overhead", "--workload", "mixed", "--pad", "1500", "--slices", "3",
                        "--sweep", "150000,1000000", "--out", path("sweep.csv")});
    ASSERT_EQ(s.code, 0) << s.err;
    const std::string csv = slurp(path("sweep.csv"));
    EXPECT_EQ(csv.rfind("slice_cycles,baseline_cycles,mitigated_cycles,direct_cost_cycles,"
                        "indirect_cost_cycles,slowdown_percent\n150000,",
                        0),
              0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

std::vector<unsigned char> pixels(const std::string &pgm, std::size_t &w, std::size_t &h) {
    std::istringstream in(pgm);
    std::string magic;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    in.get();
    EXPECT_EQ(magic, "P5");
    EXPECT_EQ(maxval, 255);
    std::vector<unsigned char> px(w * h);
    in.read(reinterpret_cast<char *>(px.data()), static_cast<std::streamsize>(px.size()));
    EXPECT_EQ(in.gcount(), static_cast<std::streamsize>(px.size()));
    return px;
}

TEST_F(Cli, HeatmapShapes) {
    spit(path("one.csv"), "secret,time_cycles,count\n0,10,4\n1,10,4\n2,10,4\n");
    ASSERT_EQ(run({"heatmap", path("one.csv"), "--out", path("one.pgm")}).code, 0);
    std::size_t w = 0, h = 0;
    auto px = pixels(slurp(path("one.pgm")), w, h);
    EXPECT_EQ(w, 3u);
    EXPECT_EQ(h, 1u);
    for (auto p : px)
        EXPECT_EQ(p, 255);

    spit(path("id.csv"), "secret,time_cycles,count\n0,30,2\n1,40,2\n2,50,2\n");
    ASSERT_EQ(run({"heatmap", path("id.csv"), "--out", path("id.pgm")}).code, 0);
    px = pixels(slurp(path("id.pgm")), w, h);
    ASSERT_EQ(w, 3u);
    ASSERT_EQ(h, 3u);
    for (std::size_t row = 0; row < h; ++row)
        for (std::size_t col = 0; col < w; ++col)
            EXPECT_EQ(px[row * w + col], row == col ? 255 : 0);

    run({"channel", "--component", "l1i", "--seed", "3", "--samples", "4", "--out",
         path("f.csv")});
    std::ifstream in(path("f.csv"));
    const ChannelMatrix m = read_matrix_csv(in);
    ASSERT_EQ(run({"heatmap", path("f.csv"), "--out", path("f.pgm")}).code, 0);
    pixels(slurp(path("f.pgm")), w, h);
    EXPECT_EQ(w, m.secret_count());
    EXPECT_EQ(h, m.bin_count());
}

TEST(Pgm, IntensityScalesToMaximum) {
    ChannelMatrix m(2);
    m.add(0, 1, 4);
    m.add(1, 1, 1);
    m.add(1, 2, 2);
    const std::string img = render_pgm(m);
    const std::string header = "P5\n2 2\n255\n";
    ASSERT_EQ(img.substr(0, header.size()), header);
    const auto *px = reinterpret_cast<const unsigned char *>(img.data() + header.size());
    EXPECT_EQ(px[0], 255); // (time 1, secret 0)
    EXPECT_EQ(px[1], 64);  // 255 / 4 rounded
    EXPECT_EQ(px[2], 0);
    EXPECT_EQ(px[3], 128); // 127.5 rounds up
}

TEST(Version, Prints) {
    const auto r = run({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("tcsim 1."), std::string::npos);
}

} // namespace
} // namespace tcsim
