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


#include "graphfuzz/campaign.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "graphfuzz/adapter.h"
#include "graphfuzz/corpus.h"
#include "graphfuzz/rng.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {
namespace {

using nlohmann::json;

constexpr uint64_t kLevelStream = 0x6c6576656cULL;

absl::Status ConfigError(absl::string_view msg) {
  return absl::InvalidArgumentError(absl::StrCat("ConfigError: ", msg));
}

std::string CaseStem(int64_t iteration) {
  return absl::StrFormat("case_%06d", iteration);
}

struct PendingCase {
  int64_t iteration = 0;
  ConstraintLevel level = ConstraintLevel::kConstrained;
  uint64_t gen_seed = 0;
  uint64_t input_seed = 0;
  GeneratedGraph gg;
  FuzzVerdict verdict;
};

// Fills `pending.gg` and `pending.verdict`. Only touches its own case.
void Execute(const CampaignConfig& cfg, const CaseConfig& base,
             PendingCase& pending) {
  CaseConfig case_cfg = base;
  case_cfg.pipelines =
      CasePipelines(pending.input_seed, cfg.random_pipelines);
  pending.verdict = RunCase(pending.gg.graph, pending.gg.infos, pending.level,
                            case_cfg, pending.input_seed);
}

absl::StatusOr<GeneratedGraph> GenerateCase(const CampaignConfig& cfg,
                                            const PendingCase& pending) {
  Rng rng(DeriveSeed(pending.gen_seed, 1));
  GenConfig gen;
  gen.node_num = static_cast<int>(
      rng.Uniform(cfg.node_num_min, cfg.node_num_max));
  gen.level = pending.level;
  gen.rng_seed = pending.gen_seed;
  gen.shapes = cfg.shapes;
  gen.weights = cfg.weights;
  return Generate(gen);
}

std::optional<BugId> SingleFault(const FaultSet& faults) {
  std::optional<BugId> only;
  for (const BugInfo& info : BugCatalog()) {
    if (!faults.Has(info.id)) continue;
    if (only) return std::nullopt;
    only = info.id;
  }
  return only;
}

}  // namespace

absl::Status CampaignConfig::Validate() const {
  if (iterations < 0) return ConfigError("iterations must be >= 0");
  if (time_budget_s < 0) return ConfigError("time_budget_s must be >= 0");
  if (node_num_min < 1 || node_num_max < node_num_min ||
      node_num_max > 10000) {
    return ConfigError("need 1 <= node_num_min <= node_num_max <= 10000");
  }
  if (!(p0 >= 0 && p0 <= 1)) return ConfigError("p0 must lie in [0, 1]");
  if (!(alpha > 0 && alpha < 1)) return ConfigError("alpha must lie in (0, 1)");
  if (!(dedup.similarity_threshold > 0 && dedup.similarity_threshold <= 1)) {
    return ConfigError("dedup.similarity_threshold must lie in (0, 1]");
  }
  if (dedup.shingle_size < 1) return ConfigError("dedup.shingle_size >= 1");
  if (num_inputs < 1) return ConfigError("num_inputs must be >= 1");
  if (random_pipelines < 0) return ConfigError("random_pipelines must be >= 0");
  if (parallelism < 1) return ConfigError("parallelism must be >= 1");
  if (parallelism > 1 && !adapters.empty()) {
    return ConfigError("adapters require parallelism 1");
  }
  GenConfig gen;
  gen.shapes = shapes;
  gen.weights = weights;
  absl::Status s = gen.Validate();
  if (!s.ok()) return ConfigError(s.message());
  return absl::OkStatus();
}

json CampaignConfig::ToJson() const {
  return json{
      {"iterations", iterations},
      {"time_budget_s", time_budget_s},
      {"node_num_min", node_num_min},
      {"node_num_max", node_num_max},
      {"shapes",
       {{"max_rank", shapes.max_rank}, {"max_extent", shapes.max_extent}}},
      {"weights",
       {{"variable", weights.variable},
        {"constant", weights.constant},
        {"op", weights.op},
        {"function", weights.function},
        {"call", weights.call}}},
      {"p0", p0},
      {"alpha", alpha},
      {"dedup",
       {{"similarity_threshold", dedup.similarity_threshold},
        {"shingle_size", dedup.shingle_size}}},
      {"num_inputs", num_inputs},
      {"random_pipelines", random_pipelines},
      {"run_mutants", run_mutants},
      {"parallelism", parallelism},
      {"corpus_dir", corpus_dir},
      {"report_path", report_path},
      {"adapters", adapters},
      {"master_seed", master_seed},
      {"faults", faults.Names()},
  };
}

absl::StatusOr<CampaignConfig> CampaignConfig::FromJson(const json& j) {
  if (!j.is_object()) return ConfigError("config must be a JSON object");
  CampaignConfig c;
  const json defaults = c.ToJson();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) {
      return ConfigError(absl::StrCat("unknown key '", key, "'"));
    }
    if (defaults[key].is_object()) {
      if (!value.is_object()) {
        return ConfigError(absl::StrCat("'", key, "' must be an object"));
      }
      for (const auto& [sub, unused] : value.items()) {
        if (!defaults[key].contains(sub)) {
          return ConfigError(absl::StrCat("unknown key '", key, ".", sub, "'"));
        }
      }
    }
  }
  try {
    c.iterations = j.value("iterations", c.iterations);
    c.time_budget_s = j.value("time_budget_s", c.time_budget_s);
    c.node_num_min = j.value("node_num_min", c.node_num_min);
    c.node_num_max = j.value("node_num_max", c.node_num_max);
    if (j.contains("shapes")) {
      const json& s = j["shapes"];
      c.shapes.max_rank = s.value("max_rank", c.shapes.max_rank);
      c.shapes.max_extent = s.value("max_extent", c.shapes.max_extent);
    }
    if (j.contains("weights")) {
      const json& w = j["weights"];
      c.weights.variable = w.value("variable", c.weights.variable);
      c.weights.constant = w.value("constant", c.weights.constant);
      c.weights.op = w.value("op", c.weights.op);
      c.weights.function = w.value("function", c.weights.function);
      c.weights.call = w.value("call", c.weights.call);
    }
    c.p0 = j.value("p0", c.p0);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("dedup")) {
      const json& d = j["dedup"];
      c.dedup.similarity_threshold =
          d.value("similarity_threshold", c.dedup.similarity_threshold);
      c.dedup.shingle_size = d.value("shingle_size", c.dedup.shingle_size);
    }
    c.num_inputs = j.value("num_inputs", c.num_inputs);
    c.random_pipelines = j.value("random_pipelines", c.random_pipelines);
    c.run_mutants = j.value("run_mutants", c.run_mutants);
    c.parallelism = j.value("parallelism", c.parallelism);
    c.corpus_dir = j.value("corpus_dir", c.corpus_dir);
    c.report_path = j.value("report_path", c.report_path);
    c.adapters = j.value("adapters", c.adapters);
    c.master_seed = j.value("master_seed", c.master_seed);
    for (const std::string& name :
         j.value("faults", std::vector<std::string>{})) {
      absl::StatusOr<BugId> id = ParseBugId(name);
      if (!id.ok()) return ConfigError(id.status().message());
      c.faults.Add(*id);
    }
  } catch (const json::exception& ex) {
    return ConfigError(ex.what());
  }
  GF_RETURN_IF_ERROR(c.Validate());
  return c;
}

absl::StatusOr<CampaignConfig> LoadCampaignConfig(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return ConfigError(text.status().message());
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return ConfigError(absl::StrCat(path, " is not JSON"));
  return CampaignConfig::FromJson(j);
}

uint64_t GenerationSeed(uint64_t master_seed, int64_t i) {
  return DeriveSeed(master_seed, 2 * static_cast<uint64_t>(i));
}

uint64_t InputSeed(uint64_t master_seed, int64_t i) {
  return DeriveSeed(master_seed, 2 * static_cast<uint64_t>(i) + 1);
}

json CampaignReport::ToJson() const {
  json bug_list = json::array();
  for (const BugRecord& b : bugs) bug_list.push_back(b.ToJson());
  return json{{"config", config},
              {"iterations_run", iterations_run},
              {"outcomes", outcomes},
              {"failures_by_oracle", failures_by_oracle},
              {"failures", failures},
              {"new_bugs", new_bugs},
              {"p_updates", p_updates},
              {"adapter_errors", adapter_errors},
              {"final_p", final_p},
              {"p_trajectory", p_trajectory},
              {"first_detection", first_detection},
              {"bugs", std::move(bug_list)}};
}

absl::StatusOr<CampaignReport> RunCampaign(const CampaignConfig& cfg) {
  GF_RETURN_IF_ERROR(cfg.Validate());
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::unique_ptr<AdapterProcess>> adapters;
  CaseConfig base;
  base.num_inputs = cfg.num_inputs;
  base.run_mutants = cfg.run_mutants;
  base.faults = cfg.faults;
  for (const std::string& command : cfg.adapters) {
    adapters.push_back(std::make_unique<AdapterProcess>(command));
    // A failed handshake is retried on the first run request.
    adapters.back()->Start().IgnoreError();
    base.adapters.push_back(adapters.back().get());
  }

  std::ofstream bug_log;
  if (!cfg.corpus_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.corpus_dir, ec);
    if (ec) return ConfigError(absl::StrCat("corpus_dir: ", ec.message()));
    bug_log.open(std::filesystem::path(cfg.corpus_dir) / "bugs.jsonl",
                 std::ios::trunc);
    if (!bug_log) return ConfigError("cannot write bugs.jsonl");
  }

  CampaignState state(cfg.p0, cfg.alpha,
                      DeriveSeed(cfg.master_seed, kLevelStream));
  const std::optional<BugId> single_fault = SingleFault(cfg.faults);
  CampaignReport report;
  report.config = cfg.ToJson();
  report.p_trajectory.push_back(state.p());

  for (int64_t next = 0; next < cfg.iterations;) {
    if (cfg.time_budget_s > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
                .count() >= cfg.time_budget_s) {
      break;
    }
    const int64_t batch =
        std::min<int64_t>(cfg.parallelism, cfg.iterations - next);
    std::vector<PendingCase> cases(batch);
    for (int64_t k = 0; k < batch; ++k) {
      PendingCase& c = cases[k];
      c.iteration = next + k;
      c.level = state.SelectLevel();
      c.gen_seed = GenerationSeed(cfg.master_seed, c.iteration);
      c.input_seed = InputSeed(cfg.master_seed, c.iteration);
      GF_ASSIGN_OR_RETURN(c.gg, GenerateCase(cfg, c));
    }
    if (batch == 1) {
      Execute(cfg, base, cases[0]);
    } else {
      std::vector<std::thread> workers;
      for (PendingCase& c : cases) {
        workers.emplace_back([&cfg, &base, &c] { Execute(cfg, base, c); });
      }
      for (std::thread& w : workers) w.join();
    }
    next += batch;

    for (PendingCase& c : cases) {
      ++report.iterations_run;
      const FuzzVerdict& v = c.verdict;
      ++report.outcomes[std::to_string(LevelNumber(c.level))]
                       [std::string(OutcomeName(v.outcome))];
      if (!v.IsFailure()) continue;
      ++report.failures;
      const std::string oracle(OracleName(v.oracle));
      ++report.failures_by_oracle[oracle];
      if (single_fault && InfoOf(*single_fault).oracle == oracle) {
        report.first_detection.emplace(std::string(InfoOf(*single_fault).name),
                                       c.iteration);
      }

      const std::string stem = CaseStem(c.iteration);
      BugRecord record;
      record.level = c.level;
      record.oracle = oracle;
      record.graph_file = cfg.corpus_dir.empty() ? "" : stem + ".graph";
      record.seed = c.gen_seed;
      const bool is_new =
          v.trace ? state.IsNewBug(*v.trace, cfg.dedup, record)
                  : state.IsNewUntracedBug(
                        absl::StrCat(oracle, ":",
                                     absl::Hex(GraphHash(c.gg.graph),
                                               absl::kZeroPad16)),
                        record);
      if (!is_new) continue;
      ++report.new_bugs;
      state.UpdateOnNewBug(c.level);
      ++report.p_updates;
      report.p_trajectory.push_back(state.p());
      report.bugs.push_back(state.history().back());
      if (cfg.corpus_dir.empty()) continue;

      CaseRecord rec;
      rec.graph = c.gg.graph;
      rec.iteration = c.iteration;
      rec.gen_seed = c.gen_seed;
      rec.settings.level = c.level;
      rec.settings.input_seed = c.input_seed;
      rec.settings.num_inputs = cfg.num_inputs;
      rec.settings.random_pipelines = cfg.random_pipelines;
      rec.settings.run_mutants = cfg.run_mutants;
      rec.settings.faults = cfg.faults;
      rec.verdict = v;
      rec.verdict.graph_ref = record.graph_file;
      GF_RETURN_IF_ERROR(SaveCase(cfg.corpus_dir, stem, rec));
      bug_log << state.history().back().ToJson().dump() << "\n";
    }
  }
  for (const auto& a : adapters) report.adapter_errors += a->adapter_errors();
  report.final_p = state.p();
  if (bug_log.is_open()) {
    bug_log.close();
    if (!bug_log) return absl::UnavailableError("cannot write bugs.jsonl");
  }
  if (!cfg.report_path.empty()) {
    GF_RETURN_IF_ERROR(
        WriteFile(cfg.report_path, report.ToJson().dump(2) + "\n"));
  }
  return report;
}

absl::StatusOr<std::vector<SweepPoint>> RunSweep(
    const CampaignConfig& cfg, const std::vector<double>& p0_grid,
    const std::vector<double>& alpha_grid) {
  if (p0_grid.empty() || alpha_grid.empty()) {
    return ConfigError("sweep grid is empty");
  }
  std::vector<SweepPoint> points;
  for (double p0 : p0_grid) {
    for (double alpha : alpha_grid) {
      const int k = static_cast<int>(points.size());
      CampaignConfig sub = cfg;
      sub.p0 = p0;
      sub.alpha = alpha;
      sub.master_seed = DeriveSeed(cfg.master_seed, k);
      sub.report_path.clear();
      if (!cfg.corpus_dir.empty()) {
        sub.corpus_dir = (std::filesystem::path(cfg.corpus_dir) /
                          absl::StrCat("point_", k))
                             .string();
      }
      SweepPoint point;
      point.p0 = p0;
      point.alpha = alpha;
      GF_ASSIGN_OR_RETURN(point.report, RunCampaign(sub));
      points.push_back(std::move(point));
    }
  }
  return points;
}

std::string SweepCsv(const std::vector<SweepPoint>& points) {
  std::string out =
      "point,p0,alpha,master_seed,iterations,failures,new_bugs,"
      "level0_new_bugs,level1_new_bugs,final_p\n";
  for (size_t k = 0; k < points.size(); ++k) {
    const CampaignReport& r = points[k].report;
    int level0 = 0;
    for (const BugRecord& b : r.bugs) {
      if (b.level == ConstraintLevel::kUnconstrained) ++level0;
    }
    absl::StrAppend(
        &out,
        absl::StrFormat("%d,%.6g,%.6g,%d,%d,%d,%d,%d,%d,%.6f\n", k,
                        points[k].p0, points[k].alpha,
                        r.config.value("master_seed", uint64_t{0}),
                        r.iterations_run, r.failures, r.new_bugs, level0,
                        static_cast<int64_t>(r.bugs.size()) - level0,
                        r.final_p));
  }
  return out;
}

json SweepJson(const std::vector<SweepPoint>& points) {
  json out = json::array();
  for (const SweepPoint& p : points) {
    out.push_back(json{{"p0", p.p0}, {"alpha", p.alpha},
                       {"report", p.report.ToJson()}});
  }
  return out;
}

}  // namespace graphfuzz
