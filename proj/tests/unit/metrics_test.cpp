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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "corpus.hpp"
#include "oracle/metric_oracle.hpp"
#include "sightline/error.hpp"
#include "sightline/metrics.hpp"

using namespace sightline::eval;

namespace {

TokenizedText tk(std::string_view s) { return tokenize(s); }

std::vector<TokenizedText> refs(std::initializer_list<std::string_view> list) {
  std::vector<TokenizedText> out;
  for (auto s : list) out.push_back(tokenize(s));
  return out;
}

std::vector<CorpusItem> to_corpus(const std::vector<testing_support::TextItem>& items) {
  std::vector<CorpusItem> out;
  for (const auto& it : items) {
    CorpusItem c;
    c.candidate = tokenize(it.candidate);
    for (const auto& r : it.references) c.references.push_back(tokenize(r));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST(Tokenizer, LowercasesAndStripsEdgePunctuation) {
  EXPECT_EQ(tk("  The CAT, sat... on \"the\" mat!").tokens,
            (std::vector<std::string>{"the", "cat", "sat", "on", "the", "mat"}));
  EXPECT_EQ(tk("don't stop").tokens, (std::vector<std::string>{"don't", "stop"}));
  EXPECT_TRUE(tk(" -- ?! ").tokens.empty());
  EXPECT_EQ(tk("a\tb\nc").tokens.size(), 3u);
}

TEST(Bleu, Anchors) {
  auto r = refs({"the cat sat on the mat"});
  EXPECT_NEAR(bleu_n(tk("the cat sat"), r, 1), std::exp(-1.0), 1e-12);
  EXPECT_DOUBLE_EQ(bleu_n(tk("the cat sat"), refs({"the cat sat"}), 1), 1.0);
  EXPECT_DOUBLE_EQ(bleu_n(tk("the cat sat"), refs({"the cat sat"}), 2), 1.0);
  EXPECT_EQ(bleu_n(tk("dog"), refs({"the cat sat"}), 1), 0.0);
}

TEST(Bleu, SingleTokenHasNoBigrams) { EXPECT_EQ(bleu_n(tk("yes"), refs({"yes"}), 2), 0.0); }

TEST(Bleu, ClippingUsesMaxOverReferences) {
  // "the the the" vs max count of "the" = 2 in the second reference.
  double got = bleu_n(tk("the the the"), refs({"the cat", "the the dog"}), 1);
  EXPECT_NEAR(got, 2.0 / 3.0, 1e-12);
}

TEST(Bleu, ClosestReferenceLengthTiesGoShorter) {
  // c = 3, reference lengths 2 and 4 are equally close; the shorter one means no penalty.
  EXPECT_NEAR(bleu_n(tk("a b c"), refs({"a b c d", "a b"}), 1), 1.0, 1e-12);
  // With only the longer one, BP = exp(1 - 4/3).
  EXPECT_NEAR(bleu_n(tk("a b c"), refs({"a b c d"}), 1), std::exp(1.0 - 4.0 / 3.0), 1e-12);
}

TEST(Bleu, RejectsBadArguments) {
  std::vector<TokenizedText> none;
  EXPECT_THROW(bleu_n(tk("a"), none, 1), sightline::Error);
  EXPECT_THROW(bleu_n(tk("a"), refs({"a"}), 3), sightline::Error);
}

TEST(Bleu, AppendingUnseenTokenNeverRaisesNumerator) {
  auto corpus = testing_support::synthetic_corpus(100, 11);
  for (const auto& item : corpus) {
    auto cand = tokenize(item.candidate);
    std::vector<TokenizedText> r;
    for (const auto& s : item.references) r.push_back(tokenize(s));
    auto longer = cand;
    longer.tokens.push_back("zzzunseen");
    // Recover the clipped match count from the library's BLEU_1 by dividing out the brevity penalty.
    auto numerator = [&](const TokenizedText& c) {
      double len = static_cast<double>(c.tokens.size());
      if (len == 0) return 0.0;
      double closest = 1e300, best_gap = 1e300;
      for (const auto& ref : r) {
        double gap = std::abs(static_cast<double>(ref.tokens.size()) - len);
        if (gap < best_gap || (gap == best_gap && ref.tokens.size() < closest)) {
          best_gap = gap;
          closest = static_cast<double>(ref.tokens.size());
        }
      }
      double bp = len < closest ? std::exp(1.0 - closest / len) : 1.0;
      return bleu_n(c, r, 1) * len / bp;
    };
    EXPECT_LE(numerator(longer), numerator(cand) + 1e-9);
  }
}

TEST(RougeL, Anchors) {
  EXPECT_NEAR(rouge_l(tk("the cat sat"), refs({"the cat on the mat"})), 0.47843, 1e-5);
  EXPECT_DOUBLE_EQ(rouge_l(tk("the cat sat"), refs({"the cat sat"})), 1.0);
  EXPECT_EQ(rouge_l(tk("dog"), refs({"the cat sat"})), 0.0);
}

TEST(RougeL, HandComputed) {
  double r = 2.0 / 5.0, p = 2.0 / 3.0, b2 = kRougeBeta * kRougeBeta;
  double f = (1 + b2) * r * p / (r + b2 * p);
  EXPECT_NEAR(rouge_l(tk("the cat sat"), refs({"the cat on the mat"})), f, 1e-15);
}

TEST(Meteor, Anchors) {
  EXPECT_NEAR(meteor(tk("the cat sat"), refs({"the cat sat"})), 0.981481, 1e-6);
  EXPECT_NEAR(meteor(tk("sat cat the"), refs({"the cat sat"})), 0.5, 1e-12);
  EXPECT_EQ(meteor(tk("dog"), refs({"the cat sat"})), 0.0);
}

TEST(Meteor, ChunkCountAgreesWithExhaustiveAlignment) {
  oracle::Tokens a = {"sat", "cat", "the"}, b = {"the", "cat", "sat"};
  auto al = oracle::best_alignment_exhaustive(a, b);
  EXPECT_EQ(al.matches, 3u);
  EXPECT_EQ(al.chunks, 3u);
  auto id = oracle::best_alignment_exhaustive(b, b);
  EXPECT_EQ(id.chunks, 1u);
}

TEST(Cider, Anchors) {
  std::vector<CorpusItem> single = {{tk("the cat sat"), refs({"the cat sat"})}};
  auto one = cider(single);
  EXPECT_EQ(one.per_item.at(0), 0.0);

  std::vector<CorpusItem> two = {{tk("the cat sat on the mat"), refs({"the cat sat on the mat"})},
                                 {tk("a dog ran in a park"), refs({"a dog ran in a park"})}};
  auto res = cider(two);
  EXPECT_EQ(res.per_item.at(0), 10.0);
  EXPECT_EQ(res.per_item.at(1), 10.0);
  EXPECT_EQ(res.mean, 10.0);

  std::vector<CorpusItem> miss = {{tk("zebra"), refs({"the cat sat"})}, {tk("a dog"), refs({"a dog"})}};
  EXPECT_EQ(cider(miss).per_item.at(0), 0.0);

  EXPECT_THROW(cider(std::vector<CorpusItem>{}), sightline::Error);
}

TEST(Cider, CorpusOrderPermutationInvariant) {
  auto corpus = to_corpus(testing_support::synthetic_corpus(60, 5));
  auto base = cider(corpus);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(99);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<CorpusItem> permuted;
    for (auto i : order) permuted.push_back(corpus[i]);
    auto got = cider(permuted);
    for (std::size_t k = 0; k < order.size(); ++k) EXPECT_NEAR(got.per_item[k], base.per_item[order[k]], 1e-12);
  }
}

TEST(Metrics, ReferencePermutationInvariant) {
  auto corpus = to_corpus(testing_support::synthetic_corpus(80, 21));
  auto base = score_all(corpus);
  for (auto& item : corpus) std::reverse(item.references.begin(), item.references.end());
  auto flipped = score_all(corpus);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_NEAR(flipped.per_item[i].bleu1, base.per_item[i].bleu1, 1e-12);
    EXPECT_NEAR(flipped.per_item[i].bleu2, base.per_item[i].bleu2, 1e-12);
    EXPECT_NEAR(flipped.per_item[i].meteor, base.per_item[i].meteor, 1e-12);
    EXPECT_NEAR(flipped.per_item[i].rouge_l, base.per_item[i].rouge_l, 1e-12);
    EXPECT_NEAR(flipped.per_item[i].cider, base.per_item[i].cider, 1e-12);
  }
}

TEST(Metrics, ZeroIffNoUnigramOverlap) {
  auto corpus = to_corpus(testing_support::synthetic_corpus(150, 8));
  auto scores = score_all(corpus);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    bool overlap = false;
    for (const auto& t : corpus[i].candidate.tokens)
      for (const auto& r : corpus[i].references)
        overlap = overlap || std::find(r.tokens.begin(), r.tokens.end(), t) != r.tokens.end();
    const auto& s = scores.per_item[i];
    EXPECT_EQ(s.bleu1 > 0, overlap) << i;
    EXPECT_EQ(s.rouge_l > 0, overlap) << i;
    EXPECT_EQ(s.meteor > 0, overlap) << i;
  }
}

TEST(Metrics, RangesAndDeterminism) {
  auto corpus = to_corpus(testing_support::synthetic_corpus(120, 3));
  auto a = score_all(corpus);
  auto b = score_all(corpus);
  EXPECT_EQ(a.per_item, b.per_item);
  EXPECT_EQ(a.mean, b.mean);
  for (const auto& s : a.per_item) {
    for (double v : {s.bleu1, s.bleu2, s.meteor, s.rouge_l}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
    EXPECT_GE(s.cider, 0.0);
    EXPECT_LE(s.cider, 10.0 + 1e-9);
  }
}

TEST(Metrics, IdenticalPairsScoreOne) {
  std::vector<CorpusItem> corpus = {{tk("yes"), refs({"yes"})}, {tk("two dogs"), refs({"two dogs"})}};
  auto s = score_all(corpus);
  EXPECT_DOUBLE_EQ(s.mean.bleu1, 1.0);
  EXPECT_DOUBLE_EQ(s.mean.rouge_l, 1.0);
  EXPECT_THROW(score_all(std::vector<CorpusItem>{}), sightline::Error);
}

TEST(Metrics, MatchesBruteForceOracle) {
  auto raw = testing_support::synthetic_corpus(80, 42);
  auto corpus = to_corpus(raw);
  std::vector<oracle::Item> ocorpus;
  for (const auto& it : raw) {
    oracle::Item o;
    o.candidate = oracle::tokenize(it.candidate);
    for (const auto& r : it.references) o.references.push_back(oracle::tokenize(r));
    ocorpus.push_back(std::move(o));
  }
  auto got = score_all(corpus);
  auto ocider = oracle::cider(ocorpus);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ASSERT_EQ(corpus[i].candidate.tokens, ocorpus[i].candidate) << i;
    const auto& o = ocorpus[i];
    EXPECT_NEAR(got.per_item[i].bleu1, oracle::bleu(o.candidate, o.references, 1), 1e-9) << i;
    EXPECT_NEAR(got.per_item[i].bleu2, oracle::bleu(o.candidate, o.references, 2), 1e-9) << i;
    EXPECT_NEAR(got.per_item[i].rouge_l, oracle::rouge_l(o.candidate, o.references), 1e-9) << i;
    EXPECT_NEAR(got.per_item[i].meteor, oracle::meteor(o.candidate, o.references), 1e-9) << i;
    EXPECT_NEAR(got.per_item[i].cider, ocider[i], 1e-9) << i;
  }
}
