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


// vqa-eval: scores VizWiz-format predictions per question category.
//
//   vqa-eval --annotations val.json --predictions preds.ndjson --out report.txt
//            [--metrics bleu1,bleu2,meteor,rouge_l,cider] [--format text|json]
//            [--manual-scores scores.ndjson]
//
// Exit status: 0 on success, 2 on schema or range errors, 1 otherwise.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sightline/error.hpp"
#include "sightline/vizwiz.hpp"

namespace vz = sightline::vizwiz;

int main(int argc, char** argv) {
  CLI::App app{"Per-category NLG metrics over VizWiz-format annotations"};
  std::string annotations, predictions, out_path, metrics = "bleu1,bleu2,meteor,rouge_l,cider", format = "text";
  std::string manual_scores;
  app.add_option("--annotations", annotations, "Annotation JSON array")->required();
  app.add_option("--predictions", predictions, "Newline-delimited JSON predictions")->required();
  app.add_option("--out", out_path, "Report output path")->required();
  app.add_option("--metrics", metrics, "Comma-separated metric list");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--manual-scores", manual_scores, "Newline-delimited JSON helpfulness scores");
  CLI11_PARSE(app, argc, argv);

  try {
    auto items = vz::join_predictions(vz::load_annotations(annotations), std::filesystem::path(predictions));
    auto rep = vz::report(items, vz::parse_metric_list(metrics));
    if (!manual_scores.empty()) rep.manual_means = vz::aggregate_manual_scores(vz::load_manual_scores(manual_scores));

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "vqa-eval: cannot write " << out_path << '\n';
      return 1;
    }
    if (format == "json") {
      out << rep.to_json().dump(2) << '\n';
    } else {
      out << rep.render_text();
    }
    return 0;
  } catch (const sightline::Error& e) {
    std::cerr << "vqa-eval: " << e.what() << '\n';
    auto code = e.code();
    return code == sightline::ErrorCode::kSchema || code == sightline::ErrorCode::kRange ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "vqa-eval: " << e.what() << '\n';
    return 1;
  }
}
