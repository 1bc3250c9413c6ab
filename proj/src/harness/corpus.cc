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


#include "graphfuzz/corpus.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "graphfuzz/relaxation.h"
#include "graphfuzz/status_macros.h"

namespace graphfuzz {

namespace fs = std::filesystem;
using nlohmann::json;

CaseConfig ReplaySettings::ToCaseConfig() const {
  CaseConfig cfg;
  cfg.num_inputs = num_inputs;
  cfg.pipelines = CasePipelines(input_seed, random_pipelines);
  cfg.run_mutants = run_mutants;
  cfg.faults = faults;
  return cfg;
}

json ReplaySettings::ToJson() const {
  return json{{"level", LevelNumber(level)},
              {"input_seed", input_seed},
              {"num_inputs", num_inputs},
              {"random_pipelines", random_pipelines},
              {"run_mutants", run_mutants},
              {"faults", faults.Names()}};
}

absl::StatusOr<ReplaySettings> ReplaySettings::FromJson(const json& j) {
  ReplaySettings s;
  try {
    int level = j.at("level").get<int>();
    if (level != 0 && level != 1) {
      return absl::InvalidArgumentError("level must be 0 or 1");
    }
    s.level = static_cast<ConstraintLevel>(level);
    s.input_seed = j.at("input_seed").get<uint64_t>();
    s.num_inputs = j.value("num_inputs", s.num_inputs);
    s.random_pipelines = j.value("random_pipelines", s.random_pipelines);
    s.run_mutants = j.value("run_mutants", s.run_mutants);
    for (const std::string& name :
         j.value("faults", std::vector<std::string>{})) {
      GF_ASSIGN_OR_RETURN(BugId id, ParseBugId(name));
      s.faults.Add(id);
    }
  } catch (const json::exception& ex) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad replay settings: ", ex.what()));
  }
  return s;
}

json CaseRecord::SidecarJson() const {
  return json{{"iteration", iteration},
              {"gen_seed", gen_seed},
              {"node_num", graph.size()},
              {"graph_hash", GraphHash(graph)},
              {"settings", settings.ToJson()},
              {"verdict", verdict.ToJson()}};
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::Status SaveCase(const std::string& dir, const std::string& stem,
                      const CaseRecord& record) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const fs::path base = fs::path(dir) / stem;
  GF_RETURN_IF_ERROR(
      WriteFile(base.string() + ".graph", SerializeGraph(record.graph)));
  return WriteFile(base.string() + ".json",
                   record.SidecarJson().dump(2) + "\n");
}

namespace {

std::string StemOf(const std::string& path) {
  for (absl::string_view ext : {".graph", ".json"}) {
    if (absl::EndsWith(path, ext)) return path.substr(0, path.size() - ext.size());
  }
  return path;
}

Outcome ParseOutcome(const std::string& s) {
  for (Outcome o : {Outcome::kPass, Outcome::kCrash, Outcome::kInconsistency,
                    Outcome::kExpectedRejection}) {
    if (OutcomeName(o) == s) return o;
  }
  return Outcome::kPass;
}

OracleId ParseOracle(const std::string& s) {
  for (OracleId o :
       {OracleId::kNone, OracleId::kO1, OracleId::kO2, OracleId::kO3}) {
    if (OracleName(o) == s) return o;
  }
  return OracleId::kNone;
}

std::optional<std::string> OptionalText(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

}  // namespace

absl::StatusOr<CaseRecord> LoadCase(const std::string& path) {
  const std::string stem = StemOf(path);
  GF_ASSIGN_OR_RETURN(std::string text, ReadFile(stem + ".graph"));
  GF_ASSIGN_OR_RETURN(std::string side, ReadFile(stem + ".json"));
  CaseRecord record;
  GF_ASSIGN_OR_RETURN(record.graph, ParseGraph(text));
  json j = json::parse(side, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(stem, ".json is not a JSON object"));
  }
  try {
    record.iteration = j.value("iteration", int64_t{-1});
    record.gen_seed = j.value("gen_seed", uint64_t{0});
    GF_ASSIGN_OR_RETURN(record.settings,
                        ReplaySettings::FromJson(j.at("settings")));
    const json& v = j.at("verdict");
    FuzzVerdict& verdict = record.verdict;
    verdict.outcome = ParseOutcome(v.at("outcome").get<std::string>());
    verdict.oracle = ParseOracle(v.at("oracle").get<std::string>());
    verdict.level = record.settings.level;
    verdict.trace = OptionalText(v, "trace");
    verdict.graph_ref = v.value("graph_ref", "");
    verdict.input_seed = v.value("input_seed", uint64_t{0});
    for (const json& d : v.value("details", json::array())) {
      Fragment f;
      f.oracle = ParseOracle(d.value("oracle", "none"));
      f.outcome = ParseOutcome(d.value("outcome", "Pass"));
      f.subject = d.value("subject", "");
      f.trace = OptionalText(d, "trace");
      f.detail = d.value("detail", "");
      f.input_index = d.value("input_index", -1);
      verdict.details.push_back(std::move(f));
    }
  } catch (const json::exception& ex) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad sidecar ", stem, ".json: ", ex.what()));
  }
  return record;
}

FuzzVerdict ReplayCase(const ComputationalGraph& g,
                       const ReplaySettings& settings,
                       const std::vector<ExternalBackend*>& adapters) {
  CaseConfig cfg = settings.ToCaseConfig();
  cfg.adapters = adapters;
  return RunCase(g, BuildInfoTable(g), settings.level, cfg,
                 settings.input_seed);
}

bool SameVerdictClass(const FuzzVerdict& reference, const FuzzVerdict& replay,
                      double threshold) {
  if (reference.outcome != replay.outcome) return false;
  if (reference.oracle != replay.oracle) return false;
  if (!reference.trace || !replay.trace) {
    return !reference.trace && !replay.trace;
  }
  return TraceSimilarity(*reference.trace, *replay.trace) >= threshold;
}

}  // namespace graphfuzz
