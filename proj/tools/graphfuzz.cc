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


// Command-line driver for fuzzing campaigns and corpus maintenance.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "graphfuzz/adapter.h"
#include "graphfuzz/campaign.h"
#include "graphfuzz/corpus.h"
#include "graphfuzz/ir_text.h"
#include "graphfuzz/lowering.h"
#include "graphfuzz/reduce.h"
#include "graphfuzz/type_infer.h"

namespace graphfuzz {
namespace {

constexpr int kExitClean = 0;
constexpr int kExitBugs = 1;
constexpr int kExitConfig = 2;

struct FuzzFlags {
  std::string config;
  std::optional<int> iterations;
  std::optional<uint64_t> seed;
  std::optional<double> p0;
  std::optional<double> alpha;
  std::optional<double> time_budget;
  std::optional<int> node_min;
  std::optional<int> node_max;
  std::optional<int> parallelism;
  std::optional<std::string> corpus;
  std::optional<std::string> report;
  std::vector<std::string> inject;
  std::vector<std::string> adapters;
};

void AddFuzzFlags(CLI::App* app, FuzzFlags& f) {
  app->add_option("-c,--config", f.config, "campaign config file (JSON)");
  app->add_option("-n,--iterations", f.iterations, "number of cases");
  app->add_option("-s,--seed", f.seed, "master seed");
  app->add_option("--p0", f.p0, "initial probability of level 0");
  app->add_option("--alpha", f.alpha, "relaxation step");
  app->add_option("--time-budget", f.time_budget, "seconds; 0 = none");
  app->add_option("--node-min", f.node_min, "smallest graph size");
  app->add_option("--node-max", f.node_max, "largest graph size");
  app->add_option("-j,--parallelism", f.parallelism, "worker threads");
  app->add_option("--corpus", f.corpus, "corpus directory");
  app->add_option("--report", f.report, "report path");
  app->add_option("--inject", f.inject, "seeded bug to switch on");
  app->add_option("--adapter", f.adapters, "adapter command");
}

// File, then GRAPHFUZZ_CORPUS_DIR, then flags.
absl::StatusOr<CampaignConfig> ResolveConfig(const FuzzFlags& f) {
  CampaignConfig cfg;
  if (!f.config.empty()) {
    absl::StatusOr<CampaignConfig> loaded = LoadCampaignConfig(f.config);
    if (!loaded.ok()) return loaded.status();
    cfg = *std::move(loaded);
  }
  if (const char* env = std::getenv("GRAPHFUZZ_CORPUS_DIR"); env && *env) {
    cfg.corpus_dir = env;
  }
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.p0) cfg.p0 = *f.p0;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.time_budget) cfg.time_budget_s = *f.time_budget;
  if (f.node_min) cfg.node_num_min = *f.node_min;
  if (f.node_max) cfg.node_num_max = *f.node_max;
  if (f.parallelism) cfg.parallelism = *f.parallelism;
  if (f.corpus) cfg.corpus_dir = *f.corpus;
  if (f.report) cfg.report_path = *f.report;
  for (const std::string& name : f.inject) {
    absl::StatusOr<BugId> id = ParseBugId(name);
    if (!id.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("ConfigError: ", id.status().message()));
    }
    cfg.faults.Add(*id);
  }
  for (const std::string& a : f.adapters) cfg.adapters.push_back(a);
  absl::Status s = cfg.Validate();
  if (!s.ok()) return s;
  return cfg;
}

void PrintSummary(const CampaignReport& r) {
  std::cout << "iterations " << r.iterations_run << ", failures "
            << r.failures << ", new bugs " << r.new_bugs << ", final p "
            << r.final_p << "\n";
  for (const auto& [oracle, n] : r.failures_by_oracle) {
    std::cout << "  " << oracle << ": " << n << " failing cases\n";
  }
  for (const BugRecord& b : r.bugs) {
    std::cout << "  bug " << b.id << " level " << LevelNumber(b.level) << " "
              << b.oracle << (b.untraced ? " (untraced)" : "") << " "
              << b.graph_file << "\n";
  }
}

int Fuzz(const FuzzFlags& f) {
  absl::StatusOr<CampaignConfig> cfg = ResolveConfig(f);
  if (!cfg.ok()) {
    std::cerr << cfg.status().message() << "\n";
    return kExitConfig;
  }
  absl::StatusOr<CampaignReport> report = RunCampaign(*cfg);
  if (!report.ok()) {
    std::cerr << report.status().message() << "\n";
    return kExitConfig;
  }
  PrintSummary(*report);
  return report->ExitCode();
}

absl::StatusOr<std::vector<double>> ParseGrid(const std::string& text) {
  std::vector<double> out;
  for (absl::string_view item : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    double v;
    if (!absl::SimpleAtod(item, &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("ConfigError: bad grid value '", item, "'"));
    }
    out.push_back(v);
  }
  return out;
}

int Sweep(const FuzzFlags& f, const std::string& p0_grid,
          const std::string& alpha_grid, const std::string& csv_path,
          const std::string& json_path) {
  absl::StatusOr<CampaignConfig> cfg = ResolveConfig(f);
  absl::StatusOr<std::vector<double>> p0s = ParseGrid(p0_grid);
  absl::StatusOr<std::vector<double>> alphas = ParseGrid(alpha_grid);
  for (const absl::Status& s : {cfg.status(), p0s.status(), alphas.status()}) {
    if (!s.ok()) {
      std::cerr << s.message() << "\n";
      return kExitConfig;
    }
  }
  absl::StatusOr<std::vector<SweepPoint>> points =
      RunSweep(*cfg, *p0s, *alphas);
  if (!points.ok()) {
    std::cerr << points.status().message() << "\n";
    return kExitConfig;
  }
  const std::string csv = SweepCsv(*points);
  std::cout << csv;
  if (!csv_path.empty() && !WriteFile(csv_path, csv).ok()) {
    std::cerr << "cannot write " << csv_path << "\n";
    return kExitConfig;
  }
  if (!json_path.empty() &&
      !WriteFile(json_path, SweepJson(*points).dump(2) + "\n").ok()) {
    std::cerr << "cannot write " << json_path << "\n";
    return kExitConfig;
  }
  for (const SweepPoint& p : *points) {
    if (p.report.new_bugs > 0) return kExitBugs;
  }
  return kExitClean;
}

int Replay(const std::string& path, const std::vector<std::string>& adapters) {
  absl::StatusOr<CaseRecord> rec = LoadCase(path);
  if (!rec.ok()) {
    std::cerr << rec.status().message() << "\n";
    return kExitConfig;
  }
  std::vector<std::unique_ptr<AdapterProcess>> procs;
  std::vector<ExternalBackend*> backends;
  for (const std::string& a : adapters) {
    procs.push_back(std::make_unique<AdapterProcess>(a));
    backends.push_back(procs.back().get());
  }
  FuzzVerdict v = ReplayCase(rec->graph, rec->settings, backends);
  v.graph_ref = rec->verdict.graph_ref;
  std::cout << v.ToJson().dump(2) << "\n";
  std::cout << (SameVerdictClass(rec->verdict, v) ? "reproduced"
                                                  : "not reproduced")
            << ": recorded " << OutcomeName(rec->verdict.outcome) << "/"
            << OracleName(rec->verdict.oracle) << ", replayed "
            << OutcomeName(v.outcome) << "/" << OracleName(v.oracle) << "\n";
  return v.IsFailure() ? kExitBugs : kExitClean;
}

int ShrinkCmd(const std::string& path, std::string out, double threshold) {
  absl::StatusOr<CaseRecord> rec = LoadCase(path);
  if (!rec.ok()) {
    std::cerr << rec.status().message() << "\n";
    return kExitConfig;
  }
  absl::StatusOr<ShrinkResult> result =
      Shrink(rec->graph, rec->settings, rec->verdict, threshold);
  if (!result.ok()) {
    std::cerr << result.status().message() << "\n";
    return kExitBugs;
  }
  CaseRecord small = *rec;
  small.graph = result->graph;
  small.verdict = result->verdict;
  if (out.empty()) {
    out = path;
    for (absl::string_view ext : {".graph", ".json"}) {
      if (absl::EndsWith(out, ext)) out.resize(out.size() - ext.size());
    }
    out += ".min";
  }
  std::filesystem::path p(out);
  const std::string dir =
      p.has_parent_path() ? p.parent_path().string() : std::string(".");
  small.verdict.graph_ref = p.filename().string() + ".graph";
  absl::Status s = SaveCase(dir, p.filename().string(), small);
  if (!s.ok()) {
    std::cerr << s.message() << "\n";
    return kExitConfig;
  }
  std::cout << "shrunk " << rec->graph.size() << " -> "
            << result->graph.size() << " nodes in " << result->attempts
            << " replays; wrote " << out << ".graph\n"
            << SerializeGraph(result->graph);
  return kExitClean;
}

int ActiveNodes(const std::string& path, uint64_t seed) {
  absl::StatusOr<CaseRecord> rec = LoadCase(path);
  if (!rec.ok()) {
    std::cerr << rec.status().message() << "\n";
    return kExitConfig;
  }
  Pipeline pipeline = DefaultPipeline();
  pipeline.faults = rec->settings.faults;
  const int active = CountActiveNodes(rec->graph, BuildInfoTable(rec->graph),
                                      pipeline, seed);
  std::cout << active << " of " << rec->graph.size() << " nodes active\n";
  return kExitClean;
}

int AdapterCheck(const std::string& command, int cases, uint64_t seed,
                 int timeout_ms) {
  AdapterProcess adapter(command, std::chrono::milliseconds(timeout_ms));
  absl::Status s = adapter.Start();
  if (!s.ok()) {
    std::cerr << "handshake failed: " << s.message() << "\n";
    return kExitConfig;
  }
  const AdapterCapability& cap = adapter.capability();
  std::cout << "adapter " << cap.name << ": " << cap.ops.size() << " ops, "
            << cap.dtypes.size() << " dtypes declared\n";
  int agree = 0, skipped = 0, bad = 0;
  for (int i = 0; i < cases; ++i) {
    GenConfig gen;
    gen.rng_seed = DeriveSeed(seed, i);
    gen.node_num = 5 + static_cast<int>(gen.rng_seed % 20);
    absl::StatusOr<GeneratedGraph> gg = Generate(gen);
    if (!gg.ok()) continue;
    absl::StatusOr<IrModule> m = Lower(gg->graph, gg->infos);
    if (!m.ok()) continue;
    absl::StatusOr<IrModule> typed = InferTypes(*m);
    if (!typed.ok()) continue;
    absl::StatusOr<Inputs> in = RandomInputs(*typed->main(), gen.rng_seed);
    if (!in.ok()) continue;
    absl::StatusOr<Value> ref = RunBackend(*typed, *in, Backend::kTree);
    absl::StatusOr<std::optional<Value>> got = adapter.Run(*typed, *in);
    if (got.ok() && !got->has_value()) {
      ++skipped;
    } else if (ref.ok() && got.ok() && ValuesAgree(**got, *ref)) {
      ++agree;
    } else {
      ++bad;
      std::cout << "case " << i << ": "
                << (got.ok() ? std::string("value mismatch")
                             : std::string(got.status().message()))
                << "\n";
    }
  }
  std::cout << agree << " agree, " << bad << " disagree, " << skipped
            << " unsupported\n";
  return bad == 0 ? kExitClean : kExitBugs;
}

int Main(int argc, char** argv) {
  CLI::App app{"Graph-level compiler fuzzer"};
  app.require_subcommand(1);

  FuzzFlags fuzz_flags;
  CLI::App* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  AddFuzzFlags(fuzz, fuzz_flags);

  FuzzFlags sweep_flags;
  std::string p0_grid = "0,0.2,0.4,0.6,0.8,1.0", alpha_grid = "0.01";
  std::string csv_path, json_path;
  CLI::App* sweep = app.add_subcommand("sweep", "grid over p0 and alpha");
  AddFuzzFlags(sweep, sweep_flags);
  sweep->add_option("--p0-grid", p0_grid, "comma-separated p0 values");
  sweep->add_option("--alpha-grid", alpha_grid, "comma-separated alphas");
  sweep->add_option("--csv", csv_path, "CSV output path");
  sweep->add_option("--json", json_path, "JSON output path");

  std::string case_path;
  std::vector<std::string> replay_adapters;
  CLI::App* replay = app.add_subcommand("replay", "re-run a corpus case");
  replay->add_option("case", case_path, "case file or stem")->required();
  replay->add_option("--adapter", replay_adapters, "adapter command");

  std::string shrink_out;
  double threshold = 0.90;
  CLI::App* shrink = app.add_subcommand("shrink", "minimize a corpus case");
  shrink->add_option("case", case_path, "case file or stem")->required();
  shrink->add_option("-o,--out", shrink_out, "output stem");
  shrink->add_option("--threshold", threshold, "trace similarity to keep");

  uint64_t active_seed = 0;
  CLI::App* active =
      app.add_subcommand("active-nodes", "count active nodes of a case");
  active->add_option("case", case_path, "case file or stem")->required();
  active->add_option("--input-seed", active_seed, "input seed");

  std::string adapter_cmd;
  int check_cases = 20, timeout_ms = 10000;
  uint64_t check_seed = 0;
  CLI::App* check =
      app.add_subcommand("adapter-check", "handshake and compare an adapter");
  check->add_option("cmd", adapter_cmd, "adapter command")->required();
  check->add_option("--cases", check_cases, "generated cases to compare");
  check->add_option("--seed", check_seed, "generation seed");
  check->add_option("--timeout-ms", timeout_ms, "per-request timeout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitClean : kExitConfig;
  }

  if (*fuzz) return Fuzz(fuzz_flags);
  if (*sweep) {
    return Sweep(sweep_flags, p0_grid, alpha_grid, csv_path, json_path);
  }
  if (*replay) return Replay(case_path, replay_adapters);
  if (*shrink) return ShrinkCmd(case_path, shrink_out, threshold);
  if (*active) return ActiveNodes(case_path, active_seed);
  if (*check) {
    return AdapterCheck(adapter_cmd, check_cases, check_seed, timeout_ms);
  }
  return kExitConfig;
}

}  // namespace
}  // namespace graphfuzz

int main(int argc, char** argv) { return graphfuzz::Main(argc, argv); }
