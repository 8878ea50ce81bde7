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


#include "sightline/vizwiz.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

#include "sightline/error.hpp"

namespace sightline::vizwiz {

namespace {

[[noreturn]] void schema_error(std::size_t index, std::string_view field, std::string_view what) {
  throw Error(ErrorCode::kSchema,
              "item " + std::to_string(index) + ", field '" + std::string(field) + "': " + std::string(what));
}

std::optional<bool> parse_answerable(const Json& v, std::size_t index) {
  if (v.is_null()) return std::nullopt;
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) {
    auto n = v.get<long long>();
    if (n == 0 || n == 1) return n == 1;
  }
  schema_error(index, "answerable", "expected 0, 1 or a boolean");
}

std::optional<AnswerType> answer_type_field(const Json& obj, std::size_t index, std::string_view field) {
  auto it = obj.find("answer_type");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(index, field, "expected a string");
  auto t = parse_answer_type(it->get<std::string>());
  if (!t) schema_error(index, field, "unknown answer type '" + it->get<std::string>() + "'");
  return t;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string_view to_string(AnswerType t) {
  switch (t) {
    case AnswerType::kYesNo: return "yes/no";
    case AnswerType::kNumber: return "number";
    case AnswerType::kOther: return "other";
    case AnswerType::kUnanswerable: return "unanswerable";
  }
  return "other";
}

std::optional<AnswerType> parse_answer_type(std::string_view s) {
  for (auto t : {AnswerType::kYesNo, AnswerType::kNumber, AnswerType::kOther, AnswerType::kUnanswerable}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

std::string_view label(Category c) {
  switch (c) {
    case Category::kUnanswerable: return "Unanswerable";
    case Category::kOther: return "Other";
    case Category::kYesNo: return "Yes/No";
    case Category::kNumber: return "Number";
  }
  return "Other";
}

std::vector<EvalItem> parse_annotations(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchema, "annotations must be a JSON array");
  std::vector<EvalItem> items;
  items.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& obj = j[i];
    if (!obj.is_object()) schema_error(i, "<item>", "expected an object");
    EvalItem item;
    for (const char* field : {"image", "question"}) {
      auto it = obj.find(field);
      if (it == obj.end()) schema_error(i, field, "missing");
      if (!it->is_string()) schema_error(i, field, "expected a string");
    }
    item.image_name = obj["image"].get<std::string>();
    item.question = obj["question"].get<std::string>();

    auto answers = obj.find("answers");
    if (answers == obj.end()) schema_error(i, "answers", "missing");
    if (!answers->is_array()) schema_error(i, "answers", "expected an array");
    for (const auto& a : *answers) {
      if (!a.is_object()) schema_error(i, "answers", "each answer must be an object");
      auto text = a.find("answer");
      if (text == a.end() || !text->is_string()) schema_error(i, "answers", "each answer needs a string 'answer'");
      if (auto t = answer_type_field(a, i, "answers.answer_type")) item.answer_types.push_back(*t);
      auto s = text->get<std::string>();
      if (!s.empty()) item.references.push_back(std::move(s));
    }
    if (item.references.empty()) schema_error(i, "answers", "no non-empty answer");

    item.answer_type = answer_type_field(obj, i, "answer_type");
    if (auto it = obj.find("answerable"); it != obj.end()) item.answerable = parse_answerable(*it, i);

    bool derivable = item.answer_type || (item.answerable && !*item.answerable) || !item.answer_types.empty();
    if (!derivable) schema_error(i, "answer_type", "missing and no per-answer types to derive a category from");
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<EvalItem> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSchema, "cannot open annotations file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return parse_annotations(j);
}

Category categorize(const EvalItem& item) {
  if ((item.answerable && !*item.answerable) || item.answer_type == AnswerType::kUnanswerable) {
    return Category::kUnanswerable;
  }
  auto to_category = [](AnswerType t) {
    switch (t) {
      case AnswerType::kYesNo: return Category::kYesNo;
      case AnswerType::kNumber: return Category::kNumber;
      case AnswerType::kUnanswerable: return Category::kUnanswerable;
      case AnswerType::kOther: break;
    }
    return Category::kOther;
  };
  if (item.answer_type) return to_category(*item.answer_type);

  // Candidates in tie-break priority order; the first with the top count wins.
  constexpr std::array<Category, 4> priority = {Category::kUnanswerable, Category::kYesNo, Category::kNumber,
                                                Category::kOther};
  std::array<int, 4> votes{};
  for (auto t : item.answer_types) {
    auto c = to_category(t);
    ++votes[std::find(priority.begin(), priority.end(), c) - priority.begin()];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < priority.size(); ++k) {
    if (votes[k] > votes[best]) best = k;
  }
  return priority[best];
}

std::vector<EvalItem> join_predictions(std::vector<EvalItem> items, std::string_view predictions_ndjson) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::size_t> by_key;
  for (std::size_t i = 0; i < items.size(); ++i) by_key.emplace(Key{items[i].image_name, items[i].question}, i);

  std::vector<std::string> problems;
  std::vector<int> hits(items.size(), 0);
  std::istringstream lines{std::string(predictions_ndjson)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "line " + std::to_string(line_no);
    Json p;
    try {
      p = Json::parse(line);
    } catch (const Json::parse_error&) {
      problems.push_back(where + ": not valid JSON");
      continue;
    }
    if (!p.is_object() || !p.contains("answer") || !p["answer"].is_string()) {
      problems.push_back(where + ": needs a string 'answer'");
      continue;
    }
    std::optional<std::size_t> target;
    std::string name;
    if (p.contains("index")) {
      if (!p["index"].is_number_integer() || p["index"].get<long long>() < 0) {
        problems.push_back(where + ": 'index' must be a non-negative integer");
        continue;
      }
      auto idx = p["index"].get<std::size_t>();
      name = "index " + std::to_string(idx);
      if (idx < items.size()) target = idx;
    } else if (p.contains("image") && p.contains("question") && p["image"].is_string() &&
               p["question"].is_string()) {
      Key key{p["image"].get<std::string>(), p["question"].get<std::string>()};
      name = "(" + key.first + ", " + key.second + ")";
      if (auto it = by_key.find(key); it != by_key.end()) target = it->second;
    } else {
      problems.push_back(where + ": needs 'index' or both 'image' and 'question'");
      continue;
    }
    if (!target) {
      problems.push_back(where + ": orphan prediction " + name);
      continue;
    }
    if (++hits[*target] > 1) {
      problems.push_back(where + ": duplicate prediction " + name);
      continue;
    }
    items[*target].candidate = p["answer"].get<std::string>();
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (hits[i] == 0) {
      problems.push_back("missing prediction for item " + std::to_string(i) + " (" + items[i].image_name + ", " +
                         items[i].question + ")");
    }
  }
  if (!problems.empty()) {
    std::string msg = "predictions do not join with annotations:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kSchema, msg);
  }
  return items;
}

std::vector<EvalItem> join_predictions(std::vector<EvalItem> items, const std::filesystem::path& predictions_path) {
  std::ifstream in(predictions_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSchema, "cannot open predictions file " + predictions_path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return join_predictions(std::move(items), std::string_view(ss.str()));
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kBleu1: return "bleu1";
    case Metric::kBleu2: return "bleu2";
    case Metric::kMeteor: return "meteor";
    case Metric::kRougeL: return "rouge_l";
    case Metric::kCider: return "cider";
  }
  return "";
}

namespace {

std::string_view metric_header(Metric m) {
  switch (m) {
    case Metric::kBleu1: return "BLEU_1";
    case Metric::kBleu2: return "BLEU_2";
    case Metric::kMeteor: return "METEOR";
    case Metric::kRougeL: return "ROUGE_L";
    case Metric::kCider: return "CIDEr";
  }
  return "";
}

}  // namespace

std::vector<Metric> all_metrics() {
  return {Metric::kBleu1, Metric::kBleu2, Metric::kMeteor, Metric::kRougeL, Metric::kCider};
}

std::vector<Metric> parse_metric_list(std::string_view list) {
  std::vector<Metric> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto end = list.find(',', pos);
    if (end == std::string_view::npos) end = list.size();
    auto name = list.substr(pos, end - pos);
    auto all = all_metrics();
    auto it = std::find_if(all.begin(), all.end(), [&](Metric m) { return metric_name(m) == name; });
    if (it == all.end()) throw Error(ErrorCode::kValidation, "unknown metric '" + std::string(name) + "'");
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
    pos = end + 1;
  }
  return out;
}

double metric_value(const eval::MetricScores& s, Metric m) {
  switch (m) {
    case Metric::kBleu1: return s.bleu1;
    case Metric::kBleu2: return s.bleu2;
    case Metric::kMeteor: return s.meteor;
    case Metric::kRougeL: return s.rouge_l;
    case Metric::kCider: return s.cider;
  }
  return 0;
}

const CategoryRow* Report::row(Category c) const {
  for (const auto& r : rows) {
    if (r.category == c) return &r;
  }
  return nullptr;
}

Json Report::to_json() const {
  Json j = Json::object();
  Json names = Json::array();
  for (auto m : metrics) names.push_back(metric_name(m));
  j["metrics"] = names;
  Json out_rows = Json::array();
  for (const auto& r : rows) {
    Json row = Json::object();
    row["category"] = r.label;
    row["count"] = r.count;
    Json scores = Json::object();
    for (auto m : metrics) scores[std::string(metric_name(m))] = metric_value(r.scores, m);
    row["scores"] = scores;
    out_rows.push_back(row);
  }
  j["rows"] = out_rows;
  if (!manual_means.empty()) {
    Json manual = Json::object();
    for (const auto& [task, mean] : manual_means) manual[std::string(to_string(task))] = mean;
    j["manual_scores"] = manual;
  }
  return j;
}

std::string Report::render_text() const {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s%7s", "Category", "Count");
  out << buf;
  for (auto m : metrics) {
    std::snprintf(buf, sizeof buf, "%10s", std::string(metric_header(m)).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-14s%7zu", r.label.c_str(), r.count);
    out << buf;
    for (auto m : metrics) {
      std::snprintf(buf, sizeof buf, "%10s", fixed2(100.0 * metric_value(r.scores, m)).c_str());
      out << buf;
    }
    out << '\n';
  }
  if (!manual_means.empty()) {
    out << "\nManual score (of 10)\n";
    for (const auto& [task, mean] : manual_means) {
      std::snprintf(buf, sizeof buf, "%-22s%7s\n", std::string(task_label(task)).c_str(), format_score(mean).c_str());
      out << buf;
    }
  }
  return out.str();
}

Report report(const std::vector<EvalItem>& items, std::vector<Metric> metrics) {
  if (items.empty()) throw Error(ErrorCode::kPrecondition, "cannot report on an empty corpus");
  std::vector<eval::CorpusItem> corpus;
  corpus.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].candidate) {
      throw Error(ErrorCode::kPrecondition, "item " + std::to_string(i) + " has no candidate answer");
    }
    eval::CorpusItem ci;
    ci.candidate = eval::tokenize(*items[i].candidate);
    for (const auto& r : items[i].references) ci.references.push_back(eval::tokenize(r));
    corpus.push_back(std::move(ci));
  }
  auto scored = eval::score_all(corpus);

  // Sum each category in a canonical item order so the result does not
  // depend on the order of the input file.
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(items[a].image_name, items[a].question, *items[a].candidate) <
           std::tie(items[b].image_name, items[b].question, *items[b].candidate);
  });

  Report rep;
  rep.metrics = std::move(metrics);
  auto accumulate = [](eval::MetricScores& acc, const eval::MetricScores& s, double w) {
    acc.bleu1 += w * s.bleu1;
    acc.bleu2 += w * s.bleu2;
    acc.meteor += w * s.meteor;
    acc.rouge_l += w * s.rouge_l;
    acc.cider += w * s.cider;
  };
  auto scale = [](eval::MetricScores& s, double k) {
    s.bleu1 *= k;
    s.bleu2 *= k;
    s.meteor *= k;
    s.rouge_l *= k;
    s.cider *= k;
  };
  for (auto c : kCategories) {
    CategoryRow row;
    row.label = std::string(label(c));
    row.category = c;
    for (auto i : order) {
      if (categorize(items[i]) != c) continue;
      ++row.count;
      accumulate(row.scores, scored.per_item[i], 1.0);
    }
    if (row.count > 0) scale(row.scores, 1.0 / static_cast<double>(row.count));
    rep.rows.push_back(row);
  }
  CategoryRow avg;
  avg.label = "Avg.";
  for (const auto& r : rep.rows) {
    avg.count += r.count;
    accumulate(avg.scores, r.scores, static_cast<double>(r.count));
  }
  scale(avg.scores, 1.0 / static_cast<double>(avg.count));
  rep.rows.push_back(avg);
  return rep;
}

std::map<TaskHint, double> aggregate_manual_scores(const std::vector<ManualScore>& scores) {
  std::map<TaskHint, std::pair<double, std::size_t>> sums;
  for (const auto& s : scores) {
    s.validate();
    auto& [sum, n] = sums[s.task];
    sum += s.score;
    ++n;
  }
  std::map<TaskHint, double> means;
  for (const auto& [task, acc] : sums) means[task] = acc.first / static_cast<double>(acc.second);
  return means;
}

std::vector<ManualScore> load_manual_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSchema, "cannot open manual scores file " + path.string());
  std::vector<ManualScore> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ManualScore s;
    try {
      s = Json::parse(line).get<ManualScore>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchema, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchema, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_score(double mean) { return fixed2(mean); }

}  // namespace sightline::vizwiz
