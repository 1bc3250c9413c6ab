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

#ifndef GRAPHFUZZ_RELAXATION_H_
#define GRAPHFUZZ_RELAXATION_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/string_view.h"
#include "graphfuzz/generator.h"
#include "graphfuzz/rng.h"
#include "json.hpp"

namespace graphfuzz {

struct DedupConfig {
  double similarity_threshold = 0.90;
  int shingle_size = 3;
};

struct BugRecord {
  int id = 0;
  ConstraintLevel level = ConstraintLevel::kConstrained;
  std::string oracle;
  std::string normalized_trace;  // empty for untraced records
  bool untraced = false;
  std::string graph_file;
  uint64_t seed = 0;

  nlohmann::json ToJson() const;
};

// Campaign-wide feedback state. Owned by a single thread.
class CampaignState {
 public:
  CampaignState(double p0, double alpha, uint64_t seed);

  double p() const { return p_; }
  double alpha() const { return alpha_; }
  const std::vector<BugRecord>& history() const { return history_; }

  // Level 0 with probability p.
  ConstraintLevel SelectLevel();
  // p += alpha after a new level-0 bug, p -= alpha after a new level-1 bug,
  // clamped to [0, 1].
  void UpdateOnNewBug(ConstraintLevel level);

  // True iff every recorded trace is less similar than the threshold; a new
  // trace is appended to the history.
  bool IsNewBug(absl::string_view trace, const DedupConfig& cfg,
                BugRecord record);
  // Traceless failures skip similarity analysis; `key` (oracle + graph hash)
  // only suppresses exact repeats.
  bool IsNewUntracedBug(const std::string& key, BugRecord record);

 private:
  double p_;
  double alpha_;
  Rng rng_;
  std::vector<BugRecord> history_;
  std::vector<std::vector<std::string>> history_tokens_;
  std::set<std::string> untraced_keys_;
};

double UpdatedP(double p, double alpha, ConstraintLevel level);

// Lowercases and replaces paths, hex addresses, and digit runs with
// placeholder tokens; punctuation separates words.
std::vector<std::string> NormalizeTraceTokens(absl::string_view trace);
std::string NormalizeTrace(absl::string_view trace);
// Cosine similarity of word-shingle multisets of the normalized traces.
double TraceSimilarity(absl::string_view a, absl::string_view b,
                       int shingle_size = 3);
double TokenSimilarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b, int shingle_size);

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_RELAXATION_H_
