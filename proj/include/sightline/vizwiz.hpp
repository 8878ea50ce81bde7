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

// VizWiz-format evaluation: annotation loading, question categorization,
// prediction joining and the per-category metric table.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sightline/domain.hpp"
#include "sightline/metrics.hpp"

namespace sightline::vizwiz {

enum class AnswerType { kYesNo, kNumber, kOther, kUnanswerable };
enum class Category { kUnanswerable, kOther, kYesNo, kNumber };

inline constexpr Category kCategories[] = {Category::kUnanswerable, Category::kOther, Category::kYesNo,
                                           Category::kNumber};

std::string_view to_string(AnswerType t);
std::optional<AnswerType> parse_answer_type(std::string_view s);
/// Row label as printed in the table: "Unanswerable", "Other", "Yes/No", "Number".
std::string_view label(Category c);

struct EvalItem {
  std::string image_name;
  std::string question;
  /// Non-empty crowd answers, in file order.
  std::vector<std::string> references;
  std::optional<AnswerType> answer_type;
  std::optional<bool> answerable;
  /// Per-answer types, for annotations that carry them.
  std::vector<AnswerType> answer_types;
  std::optional<std::string> candidate;
};

/// Reads a JSON array of {"image", "question", "answers": [{"answer", ...}],
/// "answer_type", "answerable"}. Empty answers are dropped. Throws
/// Error(kSchema) naming the item index and field on any violation.
std::vector<EvalItem> load_annotations(const std::filesystem::path& path);
std::vector<EvalItem> parse_annotations(const Json& j);

/// answerable == 0 or answer_type "unanswerable" -> Unanswerable; otherwise
/// answer_type maps directly; without one, the majority of per-answer
/// types decides, ties broken Unanswerable > YesNo > Number > Other.
Category categorize(const EvalItem& item);

/// Attaches candidates from a newline-delimited JSON predictions file whose
/// lines are {"image", "question", "answer"} or {"index", "answer"}. Every
/// item must match exactly once; all problems are reported together as one
/// Error(kSchema).
std::vector<EvalItem> join_predictions(std::vector<EvalItem> items, const std::filesystem::path& predictions_path);
std::vector<EvalItem> join_predictions(std::vector<EvalItem> items, std::string_view predictions_ndjson);

struct CategoryRow {
  std::string label;
  std::optional<Category> category;  // nullopt for the Avg row
  std::size_t count = 0;
  eval::MetricScores scores;
};

enum class Metric { kBleu1, kBleu2, kMeteor, kRougeL, kCider };
std::string_view metric_name(Metric m);
/// Parses a comma-separated list such as "bleu1,cider". Throws Error(kValidation).
std::vector<Metric> parse_metric_list(std::string_view list);
std::vector<Metric> all_metrics();
double metric_value(const eval::MetricScores& s, Metric m);

struct Report {
  /// Unanswerable, Other, Yes/No, Number, then Avg.
  std::vector<CategoryRow> rows;
  std::vector<Metric> metrics = all_metrics();
  /// Present when manual helpfulness scores were aggregated.
  std::map<TaskHint, double> manual_means;

  const CategoryRow& avg() const { return rows.back(); }
  const CategoryRow* row(Category c) const;

  Json to_json() const;
  /// Scores x100 with two decimals.
  std::string render_text() const;
};

/// Per-category means of per-item scores (CIDEr document frequencies come
/// from the whole corpus) and a count-weighted Avg row. Throws
/// Error(kPrecondition) if any candidate is missing or the corpus is empty.
Report report(const std::vector<EvalItem>& items, std::vector<Metric> metrics = all_metrics());

/// Arithmetic mean per task. Throws Error(kRange) on a score outside [0,10].
std::map<TaskHint, double> aggregate_manual_scores(const std::vector<ManualScore>& scores);
/// Newline-delimited {"item_id", "task", "score"}.
std::vector<ManualScore> load_manual_scores(const std::filesystem::path& path);
/// "9.40"
std::string format_score(double mean);

}  // namespace sightline::vizwiz
