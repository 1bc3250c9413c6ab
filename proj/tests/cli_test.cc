// Copyright 2026 The Graphfuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "graphfuzz/corpus.h"
#include "json.hpp"

namespace graphfuzz {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the tool through the shell with `env` prepended.
Result Cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = absl::StrCat(env, env.empty() ? "" : " ",
                                       GRAPHFUZZ_CLI_PATH, " ", args, " 2>&1");
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Dir(const std::string& name) {
  fs::path p = fs::path(testing::TempDir()) / ("graphfuzz_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string FirstCase(const std::string& corpus) {
  std::vector<std::string> lines =
      absl::StrSplit(*ReadFile(corpus + "/bugs.jsonl"), '\n',
                     absl::SkipEmpty());
  if (lines.empty()) return "";
  return corpus + "/" + json::parse(lines[0])["graph_file"].get<std::string>();
}

TEST(CliTest, CleanCampaignExitsZero) {
  const std::string dir = Dir("clean");
  Result r = Cli(absl::StrCat("fuzz -n 60 -s 3 --report ", dir, "/r.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  json report = json::parse(*ReadFile(dir + "/r.json"));
  EXPECT_EQ(report["iterations_run"], 60);
  EXPECT_EQ(report["new_bugs"], 0);
  EXPECT_EQ(report["config"]["master_seed"], 3);
}

TEST(CliTest, InjectedBugExitsOne) {
  const std::string dir = Dir("buggy");
  Result r = Cli(absl::StrCat("fuzz -n 100 --inject vm-negative --corpus ",
                              dir, "/corpus --report ", dir, "/r.json"));
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_TRUE(fs::exists(dir + "/corpus/bugs.jsonl"));
  json report = json::parse(*ReadFile(dir + "/r.json"));
  EXPECT_GT(report["new_bugs"].get<int>(), 0);
  EXPECT_EQ(report["first_detection"].count("vm-negative"), 1u);
}

TEST(CliTest, ConfigErrorsExitTwo) {
  const std::string dir = Dir("bad");
  ASSERT_TRUE(WriteFile(dir + "/unknown.json", R"({"iterashuns": 3})").ok());
  for (const std::string& args : {
           std::string("fuzz --p0 2"),
           std::string("fuzz --alpha 0"),
           std::string("fuzz --inject no-such-bug"),
           std::string("fuzz -c ") + dir + "/missing.json",
           std::string("fuzz -c ") + dir + "/unknown.json",
           std::string("fuzz --node-min 9 --node-max 3"),
           std::string("fuzz -j 2 --adapter cat"),
           std::string("fuzz --bogus-flag"),
           std::string("frobnicate"),
           std::string(""),
           std::string("replay ") + dir + "/nothing.graph",
           std::string("sweep --p0-grid 0,x"),
       }) {
    Result r = Cli(args);
    EXPECT_EQ(r.code, 2) << args << "\n" << r.out;
  }
}

TEST(CliTest, ConfigFileThenEnvironmentThenFlags) {
  const std::string dir = Dir("precedence");
  ASSERT_TRUE(WriteFile(dir + "/c.json",
                        absl::StrCat(R"({"iterations": 40, "corpus_dir": ")",
                                     dir, R"(/from_file", "faults": ["vm-negative"]})"))
                  .ok());
  Result env = Cli(absl::StrCat("fuzz -c ", dir, "/c.json"),
                   absl::StrCat("GRAPHFUZZ_CORPUS_DIR=", dir, "/from_env"));
  EXPECT_EQ(env.code, 1) << env.out;
  EXPECT_TRUE(fs::exists(dir + "/from_env/bugs.jsonl"));
  EXPECT_FALSE(fs::exists(dir + "/from_file"));

  Result flag = Cli(absl::StrCat("fuzz -c ", dir, "/c.json --corpus ", dir,
                                 "/from_flag -n 30"),
                    absl::StrCat("GRAPHFUZZ_CORPUS_DIR=", dir, "/from_env2"));
  EXPECT_EQ(flag.code, 1) << flag.out;
  EXPECT_TRUE(fs::exists(dir + "/from_flag/bugs.jsonl"));
  EXPECT_FALSE(fs::exists(dir + "/from_env2"));

  Result file = Cli(absl::StrCat("fuzz -c ", dir, "/c.json"));
  EXPECT_EQ(file.code, 1) << file.out;
  EXPECT_TRUE(fs::exists(dir + "/from_file/bugs.jsonl"));
}

TEST(CliTest, ReplayShrinkAndActiveNodes) {
  const std::string dir = Dir("cases");
  ASSERT_EQ(Cli(absl::StrCat("fuzz -n 150 --inject fold-umod --corpus ", dir))
                .code,
            1);
  const std::string graph = FirstCase(dir);
  ASSERT_FALSE(graph.empty());

  Result replay = Cli("replay " + graph);
  EXPECT_EQ(replay.code, 1) << replay.out;
  EXPECT_TRUE(absl::StrContains(replay.out, "\nreproduced")) << replay.out;
  EXPECT_TRUE(absl::StrContains(replay.out, "\"oracle\": \"O2\""));

  Result shrink = Cli("shrink " + graph);
  EXPECT_EQ(shrink.code, 0) << shrink.out;
  const std::string stem = graph.substr(0, graph.size() - 6);
  ASSERT_TRUE(fs::exists(stem + ".min.graph"));
  ASSERT_TRUE(fs::exists(stem + ".min.json"));
  absl::StatusOr<CaseRecord> small = LoadCase(stem + ".min.graph");
  absl::StatusOr<CaseRecord> big = LoadCase(graph);
  ASSERT_TRUE(small.ok() && big.ok());
  EXPECT_LE(small->graph.size(), big->graph.size());
  EXPECT_EQ(Cli("replay " + stem + ".min").code, 1);

  Result out = Cli(absl::StrCat("shrink ", graph, " -o ", dir, "/tiny"));
  EXPECT_EQ(out.code, 0) << out.out;
  EXPECT_TRUE(fs::exists(dir + "/tiny.graph"));

  Result active = Cli("active-nodes " + graph);
  EXPECT_EQ(active.code, 0) << active.out;
  EXPECT_TRUE(absl::StrContains(
      active.out, absl::StrCat(" of ", big->graph.size(), " nodes active")))
      << active.out;
}

TEST(CliTest, SweepWritesCsvAndJson) {
  const std::string dir = Dir("sweep");
  Result r = Cli(absl::StrCat("sweep -n 20 --p0-grid 0,0.5,1 --alpha-grid "
                              "0.01,0.05 --csv ",
                              dir, "/s.csv --json ", dir, "/s.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  std::vector<std::string> rows = absl::StrSplit(
      *ReadFile(dir + "/s.csv"), '\n', absl::SkipEmpty());
  EXPECT_EQ(rows.size(), 7u);
  EXPECT_EQ(json::parse(*ReadFile(dir + "/s.json")).size(), 6u);
}

TEST(CliTest, AdapterCheck) {
  const std::string fake = FAKE_ADAPTER_PATH;
  Result echo = Cli(absl::StrCat("adapter-check '", fake, " echo' --cases 10"));
  EXPECT_EQ(echo.code, 0) << echo.out;
  EXPECT_TRUE(absl::StrContains(echo.out, "10 agree")) << echo.out;
  Result corrupt =
      Cli(absl::StrCat("adapter-check '", fake, " corrupt' --cases 5"));
  EXPECT_EQ(corrupt.code, 1) << corrupt.out;
  Result bad = Cli(absl::StrCat("adapter-check '", fake, " badhello'"));
  EXPECT_EQ(bad.code, 2) << bad.out;
}

TEST(CliTest, FuzzWithAnAdapter) {
  const std::string fake = FAKE_ADAPTER_PATH;
  const std::string dir = Dir("adapter");
  Result ok = Cli(absl::StrCat("fuzz -n 20 --adapter '", fake,
                               " echo' --report ", dir, "/r.json"));
  EXPECT_EQ(ok.code, 0) << ok.out;
  Result bad = Cli(absl::StrCat("fuzz -n 20 --p0 0 --adapter '", fake,
                                " corrupt' --report ", dir, "/r2.json"));
  EXPECT_EQ(bad.code, 1) << bad.out;
  json report = json::parse(*ReadFile(dir + "/r2.json"));
  EXPECT_GT(report["failures_by_oracle"]["O3"].get<int>(), 0);
}

}  // namespace
}  // namespace graphfuzz
