// Copyright 2026 The Sightline Authors.
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

// Sentence-level NLG metrics for short VQA answers: BLEU-1/2, ROUGE-L,
// exact-match METEOR and CIDEr, all multi-reference.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sightline::eval {

struct TokenizedText {
  std::vector<std::string> tokens;

  bool operator==(const TokenizedText&) const = default;
};

/// Lowercase, split on whitespace, strip leading/trailing ASCII punctuation
/// from each token, drop tokens left empty.
TokenizedText tokenize(std::string_view text);

/// Geometric mean of clipped n-gram precisions for orders 1..n times the
/// brevity penalty. n must be 1 or 2.
double bleu_n(const TokenizedText& candidate, std::span<const TokenizedText> references, int n);

inline constexpr double kRougeBeta = 1.2;

/// Max over references of the LCS F-measure with beta = 1.2.
double rouge_l(const TokenizedText& candidate, std::span<const TokenizedText> references);

inline constexpr double kMeteorAlpha = 0.9;
inline constexpr double kMeteorBeta = 3.0;
inline constexpr double kMeteorGamma = 0.5;

/// Exact-match METEOR (no stemming or synonyms), max over references.
/// Alignment is leftmost greedy: each candidate token, left to right, takes
/// the first unmatched identical reference token.
double meteor(const TokenizedText& candidate, std::span<const TokenizedText> references);

struct CorpusItem {
  TokenizedText candidate;
  std::vector<TokenizedText> references;
};

struct CiderResult {
  std::vector<double> per_item;
  double mean = 0;
};

inline constexpr int kCiderMaxOrder = 4;

/// Plain CIDEr scaled by 10: per order, TF-IDF cosine between candidate and
/// each reference with document frequencies counted over the references of
/// the whole corpus; averaged over references, then over orders 1..4.
CiderResult cider(std::span<const CorpusItem> corpus);

struct MetricScores {
  double bleu1 = 0;
  double bleu2 = 0;
  double meteor = 0;
  double rouge_l = 0;
  double cider = 0;

  bool operator==(const MetricScores&) const = default;
};

struct CorpusScores {
  std::vector<MetricScores> per_item;
  MetricScores mean;
};

/// All metrics per item plus arithmetic means over items.
CorpusScores score_all(std::span<const CorpusItem> corpus);

}  // namespace sightline::eval
