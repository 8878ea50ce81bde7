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

#include "sightline/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "sightline/error.hpp"

namespace sightline::eval {

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

// N-gram key: tokens joined by a unit separator, which tokenize() never
// produces inside a token.
NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

void require_references(std::span<const TokenizedText> refs, std::string_view metric) {
  if (refs.empty()) throw Error(ErrorCode::kPrecondition, std::string(metric) + " needs at least one reference");
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double meteor_single(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  std::vector<bool> used(ref.size(), false);
  // (candidate index, reference index) in candidate order.
  std::vector<std::pair<std::size_t, std::size_t>> alignment;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (!used[j] && ref[j] == cand[i]) {
        used[j] = true;
        alignment.emplace_back(i, j);
        break;
      }
    }
  }
  if (alignment.empty()) return 0.0;
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < alignment.size(); ++k) {
    bool contiguous = alignment[k].first == alignment[k - 1].first + 1 &&
                      alignment[k].second == alignment[k - 1].second + 1;
    if (!contiguous) ++chunks;
  }
  const double m = static_cast<double>(alignment.size());
  const double precision = m / static_cast<double>(cand.size());
  const double recall = m / static_cast<double>(ref.size());
  const double fmean = precision * recall / (kMeteorAlpha * precision + (1.0 - kMeteorAlpha) * recall);
  const double penalty = kMeteorGamma * std::pow(static_cast<double>(chunks) / m, kMeteorBeta);
  return (1.0 - penalty) * fmean;
}

struct TfIdfVector {
  std::unordered_map<std::string, double> weights;
  double norm = 0;
};

TfIdfVector tfidf(const NgramCounts& counts, const std::unordered_map<std::string, int>& df, double log_items) {
  TfIdfVector v;
  for (const auto& [gram, tf] : counts) {
    auto it = df.find(gram);
    double d = it == df.end() ? 1.0 : static_cast<double>(std::max(1, it->second));
    double w = static_cast<double>(tf) * (log_items - std::log(d));
    v.weights.emplace(gram, w);
    v.norm += w * w;
  }
  v.norm = std::sqrt(v.norm);
  return v;
}

double cosine(const TfIdfVector& a, const TfIdfVector& b) {
  if (a.norm == 0 || b.norm == 0) return 0.0;
  const auto& small = a.weights.size() <= b.weights.size() ? a : b;
  const auto& large = &small == &a ? b : a;
  double dot = 0;
  for (const auto& [gram, w] : small.weights) {
    if (auto it = large.weights.find(gram); it != large.weights.end()) dot += w * it->second;
  }
  return dot / (a.norm * b.norm);
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view tok = text.substr(start, i - start);
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (tok.empty()) continue;
    std::string lower(tok);
    for (auto& c : lower) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.tokens.push_back(std::move(lower));
  }
  return out;
}

double bleu_n(const TokenizedText& candidate, std::span<const TokenizedText> references, int n) {
  require_references(references, "BLEU");
  if (n != 1 && n != 2) throw Error(ErrorCode::kPrecondition, "BLEU order must be 1 or 2");
  const auto& cand = candidate.tokens;
  if (cand.size() < static_cast<std::size_t>(n)) return 0.0;

  double log_sum = 0;
  for (int order = 1; order <= n; ++order) {
    auto cand_counts = count_ngrams(cand, order);
    NgramCounts max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, c] : count_ngrams(ref.tokens, order)) {
        auto& m = max_ref[gram];
        m = std::max(m, c);
      }
    }
    int clipped = 0;
    int total = 0;
    for (const auto& [gram, c] : cand_counts) {
      total += c;
      if (auto it = max_ref.find(gram); it != max_ref.end()) clipped += std::min(c, it->second);
    }
    if (clipped == 0) return 0.0;
    log_sum += std::log(static_cast<double>(clipped) / total);
  }

  const auto c = static_cast<double>(cand.size());
  double r = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& ref : references) {
    auto len = static_cast<double>(ref.tokens.size());
    double gap = std::abs(len - c);
    if (gap < best_gap || (gap == best_gap && len < r)) {
      best_gap = gap;
      r = len;
    }
  }
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / n);
}

double rouge_l(const TokenizedText& candidate, std::span<const TokenizedText> references) {
  require_references(references, "ROUGE-L");
  double best = 0;
  for (const auto& ref : references) {
    if (candidate.tokens.empty() || ref.tokens.empty()) continue;
    auto lcs = static_cast<double>(lcs_length(candidate.tokens, ref.tokens));
    if (lcs == 0) continue;
    double recall = lcs / static_cast<double>(ref.tokens.size());
    double precision = lcs / static_cast<double>(candidate.tokens.size());
    double b2 = kRougeBeta * kRougeBeta;
    best = std::max(best, (1 + b2) * recall * precision / (recall + b2 * precision));
  }
  return best;
}

double meteor(const TokenizedText& candidate, std::span<const TokenizedText> references) {
  require_references(references, "METEOR");
  double best = 0;
  for (const auto& ref : references) best = std::max(best, meteor_single(candidate.tokens, ref.tokens));
  return best;
}

CiderResult cider(std::span<const CorpusItem> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kPrecondition, "CIDEr needs a non-empty corpus");
  for (const auto& item : corpus) {
    if (item.references.empty()) throw Error(ErrorCode::kPrecondition, "CIDEr item without references");
  }
  const double log_items = std::log(static_cast<double>(corpus.size()));

  // Document frequency is built once for the whole corpus, then only read.
  std::vector<std::unordered_map<std::string, int>> df(kCiderMaxOrder + 1);
  for (const auto& item : corpus) {
    for (int n = 1; n <= kCiderMaxOrder; ++n) {
      std::unordered_set<std::string> seen;
      for (const auto& ref : item.references) {
        for (const auto& [gram, _] : count_ngrams(ref.tokens, n)) seen.insert(gram);
      }
      for (const auto& gram : seen) ++df[n][gram];
    }
  }

  CiderResult result;
  result.per_item.reserve(corpus.size());
  double total = 0;
  for (const auto& item : corpus) {
    double sum_orders = 0;
    for (int n = 1; n <= kCiderMaxOrder; ++n) {
      auto cand_vec = tfidf(count_ngrams(item.candidate.tokens, n), df[n], log_items);
      double sum_refs = 0;
      for (const auto& ref : item.references) {
        sum_refs += cosine(cand_vec, tfidf(count_ngrams(ref.tokens, n), df[n], log_items));
      }
      sum_orders += sum_refs / static_cast<double>(item.references.size());
    }
    double score = 10.0 * sum_orders / kCiderMaxOrder;
    result.per_item.push_back(score);
    total += score;
  }
  result.mean = total / static_cast<double>(corpus.size());
  return result;
}

CorpusScores score_all(std::span<const CorpusItem> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kPrecondition, "cannot score an empty corpus");
  auto cider_scores = cider(corpus);
  CorpusScores out;
  out.per_item.reserve(corpus.size());
  MetricScores sum;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& item = corpus[i];
    MetricScores s;
    s.bleu1 = bleu_n(item.candidate, item.references, 1);
    s.bleu2 = bleu_n(item.candidate, item.references, 2);
    s.meteor = meteor(item.candidate, item.references);
    s.rouge_l = rouge_l(item.candidate, item.references);
    s.cider = cider_scores.per_item[i];
    sum.bleu1 += s.bleu1;
    sum.bleu2 += s.bleu2;
    sum.meteor += s.meteor;
    sum.rouge_l += s.rouge_l;
    sum.cider += s.cider;
    out.per_item.push_back(s);
  }
  const auto n = static_cast<double>(corpus.size());
  out.mean = MetricScores{sum.bleu1 / n, sum.bleu2 / n, sum.meteor / n, sum.rouge_l / n, sum.cider / n};
  return out;
}

}  // namespace sightline::eval
