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


// Brute-force reference implementations of the NLG metrics, written
// without sharing code or data structures with the library. Slow on purpose.

#pragma once

#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

struct Item {
  Tokens candidate;
  std::vector<Tokens> references;
};

Tokens tokenize(const std::string& text);

double bleu(const Tokens& cand, const std::vector<Tokens>& refs, int max_order);
double rouge_l(const Tokens& cand, const std::vector<Tokens>& refs);
double meteor(const Tokens& cand, const std::vector<Tokens>& refs);
/// Per-item CIDEr (x10) with document frequencies over the whole corpus.
std::vector<double> cider(const std::vector<Item>& corpus);

/// Length of the longest common subsequence by enumerating every
/// subsequence of the shorter sequence (up to 16 tokens).
std::size_t lcs_exhaustive(const Tokens& a, const Tokens& b);

/// Matches and chunks of the minimal-chunk maximum alignment, found by
/// enumerating every maximum one-to-one exact-match alignment.
struct Alignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};
Alignment best_alignment_exhaustive(const Tokens& cand, const Tokens& ref);

}  // namespace oracle
