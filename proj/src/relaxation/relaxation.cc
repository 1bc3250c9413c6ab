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

#include "graphfuzz/relaxation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace graphfuzz {
namespace {

constexpr char kPieceSeparators[] = "!\"#$%&'()*+,-./:;<=>?@[\\]^`{|}~";

bool IsPathLike(absl::string_view word) {
  if (word.find('/') != absl::string_view::npos) return true;
  for (absl::string_view ext : {".cc", ".cpp", ".h", ".hpp", ".py", ".c"}) {
    const size_t pos = word.find(ext);
    if (pos != absl::string_view::npos && pos > 0) {
      const size_t end = pos + ext.size();
      if (end == word.size() || word[end] == ':' || word[end] == ')' ||
          word[end] == ',') {
        return true;
      }
    }
  }
  return false;
}

bool IsHexAddress(absl::string_view word) {
  if (word.size() < 3 || word[0] != '0' || (word[1] != 'x' && word[1] != 'X')) {
    return false;
  }
  size_t i = 2;
  while (i < word.size() && std::isxdigit(static_cast<unsigned char>(word[i]))) ++i;
  return i > 2;
}

std::map<std::string, int> Shingles(const std::vector<std::string>& tokens,
                                    int k) {
  std::map<std::string, int> out;
  if (tokens.empty()) return out;
  if (static_cast<int>(tokens.size()) <= k) {
    ++out[absl::StrJoin(tokens, " ")];
    return out;
  }
  for (size_t i = 0; i + k <= tokens.size(); ++i) {
    std::string s;
    for (int j = 0; j < k; ++j) {
      if (j) s += ' ';
      s += tokens[i + j];
    }
    ++out[s];
  }
  return out;
}

}  // namespace

nlohmann::json BugRecord::ToJson() const {
  return nlohmann::json{{"id", id},
                        {"level", LevelNumber(level)},
                        {"oracle", oracle},
                        {"normalized_trace", normalized_trace},
                        {"untraced", untraced},
                        {"graph_file", graph_file},
                        {"seed", seed}};
}

double UpdatedP(double p, double alpha, ConstraintLevel level) {
  const double next = level == ConstraintLevel::kUnconstrained ? p + alpha
                                                               : p - alpha;
  return std::clamp(next, 0.0, 1.0);
}

CampaignState::CampaignState(double p0, double alpha, uint64_t seed)
    : p_(std::clamp(p0, 0.0, 1.0)), alpha_(alpha), rng_(seed) {}

ConstraintLevel CampaignState::SelectLevel() {
  return rng_.UniformDouble() < p_ ? ConstraintLevel::kUnconstrained
                                   : ConstraintLevel::kConstrained;
}

void CampaignState::UpdateOnNewBug(ConstraintLevel level) {
  p_ = UpdatedP(p_, alpha_, level);
}

bool CampaignState::IsNewBug(absl::string_view trace, const DedupConfig& cfg,
                             BugRecord record) {
  std::vector<std::string> tokens = NormalizeTraceTokens(trace);
  for (const auto& seen : history_tokens_) {
    if (TokenSimilarity(tokens, seen, cfg.shingle_size) >=
        cfg.similarity_threshold) {
      return false;
    }
  }
  record.id = static_cast<int>(history_.size());
  record.normalized_trace = absl::StrJoin(tokens, " ");
  record.untraced = false;
  history_.push_back(std::move(record));
  history_tokens_.push_back(std::move(tokens));
  return true;
}

bool CampaignState::IsNewUntracedBug(const std::string& key, BugRecord record) {
  if (!untraced_keys_.insert(key).second) return false;
  record.id = static_cast<int>(history_.size());
  record.normalized_trace.clear();
  record.untraced = true;
  history_.push_back(std::move(record));
  // Untraced records never match a traced one.
  history_tokens_.push_back({"<untraced>", key});
  return true;
}

std::vector<std::string> NormalizeTraceTokens(absl::string_view trace) {
  std::vector<std::string> tokens;
  for (absl::string_view word :
       absl::StrSplit(trace, absl::ByAnyChar(" \t\r\n"), absl::SkipEmpty())) {
    if (IsPathLike(word)) {
      tokens.push_back("<path>");
      continue;
    }
    for (absl::string_view piece :
         absl::StrSplit(word, absl::ByAnyChar(kPieceSeparators),
                        absl::SkipEmpty())) {
      if (IsHexAddress(piece)) {
        tokens.push_back("<hex>");
        continue;
      }
      std::string current;
      bool in_digits = false;
      for (char c : piece) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isdigit(uc)) {
          if (!in_digits) current += "#";
          in_digits = true;
        } else {
          current += static_cast<char>(std::tolower(uc));
          in_digits = false;
        }
      }
      tokens.push_back(std::move(current));
    }
  }
  return tokens;
}

std::string NormalizeTrace(absl::string_view trace) {
  return absl::StrJoin(NormalizeTraceTokens(trace), " ");
}

double TokenSimilarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b, int shingle_size) {
  if (a.empty() && b.empty()) return 1.0;
  const auto sa = Shingles(a, shingle_size);
  const auto sb = Shingles(b, shingle_size);
  if (sa.empty() || sb.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : sa) {
    na += static_cast<double>(v) * v;
    auto it = sb.find(k);
    if (it != sb.end()) dot += static_cast<double>(v) * it->second;
  }
  for (const auto& [k, v] : sb) nb += static_cast<double>(v) * v;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double TraceSimilarity(absl::string_view a, absl::string_view b,
                       int shingle_size) {
  return TokenSimilarity(NormalizeTraceTokens(a), NormalizeTraceTokens(b),
                         shingle_size);
}

}  // namespace graphfuzz
