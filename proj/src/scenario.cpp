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


#include "sightline/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <variant>

#include "sightline/digest.hpp"
#include "sightline/error.hpp"

namespace sightline {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kValidation, msg); }

std::string step_name(std::size_t index, const ScenarioStep& step) {
  return "step " + std::to_string(index) + " (" + step.frame_ref + ")";
}

Bytes read_pinned(const std::filesystem::path& path, const std::string& sha256, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid(what + ": cannot read " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) invalid(what + ": " + path.string() + " is empty");
  auto actual = sha256_hex(bytes);
  if (actual != sha256) invalid(what + ": digest of " + path.string() + " is " + actual + ", expected " + sha256);
  return bytes;
}

template <typename T>
T opt_field(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

std::vector<std::string> word_chunks(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = text.find_first_not_of(" \t\n");
  if (pos == std::string::npos) {
    if (!text.empty()) out.push_back(text);
    return out;
  }
  // Leading whitespace rides on the first chunk.
  std::size_t start = 0;
  while (pos < text.size()) {
    auto word_end = text.find_first_of(" \t\n", pos);
    if (word_end == std::string::npos) word_end = text.size();
    auto next = text.find_first_not_of(" \t\n", word_end);
    if (next == std::string::npos) next = text.size();
    out.push_back(text.substr(start, next - start));
    start = pos = next;
  }
  return out;
}

Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
  Scenario sc;
  try {
    sc.scenario_id = j.at("scenario_id").get<std::string>();
    sc.notes = opt_field<std::string>(j, "notes", "");
    for (const auto& [ref, f] : j.at("frames").items()) {
      ScenarioFrame frame;
      frame.image = base_dir / f.at("image").get<std::string>();
      frame.content_type = f.at("content_type").get<std::string>();
      frame.sha256 = f.at("sha256").get<std::string>();
      frame.source = opt_field<std::string>(f, "source", "");
      sc.frames.emplace(ref, std::move(frame));
    }
    if (auto it = j.find("audio"); it != j.end() && !it->is_null()) {
      for (const auto& [ref, a] : it->items()) {
        ScenarioAudio audio;
        audio.file = base_dir / a.at("file").get<std::string>();
        audio.content_type = a.at("content_type").get<std::string>();
        audio.sha256 = a.at("sha256").get<std::string>();
        sc.audio.emplace(ref, std::move(audio));
      }
    }
    for (const auto& s : j.at("steps")) {
      ScenarioStep step;
      step.frame_ref = s.at("frame_ref").get<std::string>();
      step.query_text = s.at("query_text").get<std::string>();
      if (auto it = s.find("audio_ref"); it != s.end() && !it->is_null()) step.audio_ref = it->get<std::string>();
      step.expected_tags = s.at("expected_tags").get<std::vector<std::string>>();
      step.scripted_answer = s.at("scripted_answer").get<std::string>();
      if (auto it = s.find("answer_chunks"); it != s.end() && !it->is_null()) {
        step.answer_chunks = it->get<std::vector<std::string>>();
      } else {
        step.answer_chunks = word_chunks(step.scripted_answer);
      }
      if (auto it = s.find("task"); it != s.end() && !it->is_null()) {
        step.task = parse_task_hint(it->get<std::string>());
      }
      step.tagging_delay_ms = opt_field<double>(s, "tagging_delay_ms", 0);
      step.first_token_delay_ms = opt_field<double>(s, "first_token_delay_ms", 0);
      step.inter_chunk_delay_ms = opt_field<double>(s, "inter_chunk_delay_ms", 0);
      step.asr_delay_ms = opt_field<double>(s, "asr_delay_ms", 0);
      sc.steps.push_back(std::move(step));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, "scenario '" + sc.scenario_id + "': " + e.what());
  }

  std::string where = "scenario '" + sc.scenario_id + "'";
  if (sc.scenario_id.empty()) invalid("scenario_id is empty");
  if (sc.steps.empty()) invalid(where + " has no steps");
  for (auto& [ref, frame] : sc.frames) {
    frame.bytes = read_pinned(frame.image, frame.sha256, where + " frame '" + ref + "'");
  }
  for (auto& [ref, audio] : sc.audio) {
    audio.bytes = read_pinned(audio.file, audio.sha256, where + " audio '" + ref + "'");
  }
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const auto& step = sc.steps[i];
    auto name = where + " " + step_name(i, step);
    if (!sc.frames.count(step.frame_ref)) invalid(name + ": unknown frame_ref '" + step.frame_ref + "'");
    if (step.audio_ref && !sc.audio.count(*step.audio_ref)) {
      invalid(name + ": unknown audio_ref '" + *step.audio_ref + "'");
    }
    if (step.query_text.empty()) invalid(name + ": query_text is empty");
    if (step.expected_tags.empty()) invalid(name + ": expected_tags is empty");
    if (normalize_tags(step.expected_tags) != step.expected_tags) {
      invalid(name + ": expected_tags must be lowercase, trimmed and unique");
    }
    std::string joined;
    for (const auto& c : step.answer_chunks) joined += c;
    if (joined != step.scripted_answer) invalid(name + ": answer_chunks do not concatenate to scripted_answer");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open scenario file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return parse_scenario(j, path.parent_path());
}

std::vector<Scenario> load_scenario_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario(f));
  return out;
}

MockFixtureSet fixtures_from(const Scenario& scenario) {
  MockFixtureSet set;
  for (const auto& step : scenario.steps) {
    MockFixtureSet one;
    const auto& frame = scenario.frames.at(step.frame_ref);
    one.add_tagger(frame.sha256, TaggerFixture{step.expected_tags, step.tagging_delay_ms});
    VlmFixture vlm;
    vlm.chunks = step.answer_chunks;
    vlm.first_token_delay_ms = step.first_token_delay_ms;
    vlm.inter_chunk_delay_ms = step.inter_chunk_delay_ms;
    one.add_vlm(frame.sha256, vlm);
    if (step.audio_ref) {
      one.add_asr(scenario.audio.at(*step.audio_ref).sha256, AsrFixture{step.query_text, step.asr_delay_ms});
    }
    set.merge(one);
  }
  return set;
}

MockFixtureSet fixtures_from(const std::vector<Scenario>& scenarios) {
  MockFixtureSet set;
  for (const auto& sc : scenarios) set.merge(fixtures_from(sc));
  return set;
}

ReplayResult replay(const Scenario& scenario, Gateway& gateway) {
  ReplayResult result;
  result.scenario_id = scenario.scenario_id;
  auto session = gateway.create_session();

  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    const auto& step = scenario.steps[i];
    auto name = step_name(i, step);
    auto fail = [&](ErrorCode code, const std::string& what) -> void {
      throw Error(code, "scenario '" + scenario.scenario_id + "' " + name + ": " + what);
    };
    const auto& frame = scenario.frames.at(step.frame_ref);
    auto ingested = gateway.ingest_frame(session, frame.content_type, frame.bytes);

    Modality modality = Modality::kText;
    Bytes payload(step.query_text.begin(), step.query_text.end());
    std::string content_type = "text/plain";
    if (step.audio_ref) {
      const auto& audio = scenario.audio.at(*step.audio_ref);
      modality = Modality::kAudio;
      payload = audio.bytes;
      content_type = audio.content_type;
    }

    StepOutcome outcome;
    outcome.index = i;
    outcome.frame_ref = step.frame_ref;
    std::optional<ErrorEvent> error;
    bool done = false;
    auto sink = [&](const ResponseEvent& ev) {
      if (auto* c = std::get_if<ChunkEvent>(&ev)) outcome.relayed.push_back(*c);
      if (auto* e = std::get_if<ErrorEvent>(&ev)) error = *e;
      if (std::holds_alternative<DoneEvent>(ev)) done = true;
      return true;
    };
    try {
      outcome.record = gateway.handle_query(session, modality, std::move(payload), content_type, step.task, sink);
    } catch (const Error& e) {
      fail(e.code(), e.what());
    }

    if (error) fail(error->code, "stage '" + error->stage + "' failed: " + error->message);
    if (!done) fail(ErrorCode::kProtocol, "no done event");
    std::string relayed;
    for (std::size_t k = 0; k < outcome.relayed.size(); ++k) {
      if (outcome.relayed[k].seq != static_cast<int>(k)) {
        fail(ErrorCode::kValidation, "chunk " + std::to_string(k) + " has seq " +
                                         std::to_string(outcome.relayed[k].seq));
      }
      relayed += outcome.relayed[k].text;
    }
    if (relayed != step.scripted_answer) {
      fail(ErrorCode::kValidation, "relayed answer '" + relayed + "' differs from the scripted answer");
    }
    const auto& rec = outcome.record;
    if (rec.selected_frame != ingested.frame_id) fail(ErrorCode::kValidation, "answered from a different frame");
    if (rec.query.text != step.query_text) {
      fail(ErrorCode::kValidation, "query text '" + rec.query.text + "' differs from '" + step.query_text + "'");
    }
    if (rec.tags.tags != step.expected_tags) fail(ErrorCode::kValidation, "tags differ from the expected tags");
    auto sentence = compose_tag_sentence(step.expected_tags);
    if (rec.prompt.final_prompt.rfind(sentence, 0) != 0) {
      fail(ErrorCode::kValidation, "prompt does not start with '" + sentence + "'");
    }
    if (rec.prompt.final_prompt.find(step.query_text) == std::string::npos) {
      fail(ErrorCode::kValidation, "prompt does not contain the query verbatim");
    }
    if (rec.answer.final_text != step.scripted_answer) {
      fail(ErrorCode::kValidation, "stored answer differs from the scripted answer");
    }
    result.steps.push_back(std::move(outcome));
  }
  result.timings = gateway.stage_report(session);
  return result;
}

ReplayResult replay_with_mocks(const Scenario& scenario, const TemplateRegistry& templates, GatewayConfig config) {
  auto fixtures = std::make_shared<const MockFixtureSet>(fixtures_from(scenario));
  auto backends = make_backends(config, fixtures);
  Gateway gateway(std::move(config), std::move(backends), templates);
  return replay(scenario, gateway);
}

Json ReplayResult::transcript() const {
  Json j = Json::object();
  j["scenario_id"] = scenario_id;
  Json steps_json = Json::array();
  for (const auto& s : steps) {
    Json step = Json::object();
    step["index"] = s.index;
    step["frame_ref"] = s.frame_ref;
    step["task"] = s.record.query.task_hint ? Json(std::string(to_string(*s.record.query.task_hint))) : Json();
    step["query"] = s.record.query.text;
    step["tags"] = s.record.tags.tags;
    step["prompt"] = s.record.prompt.final_prompt;
    Json chunks = Json::array();
    for (const auto& c : s.relayed) chunks.push_back(c.text);
    step["chunks"] = chunks;
    step["answer"] = s.record.answer.final_text;
    steps_json.push_back(step);
  }
  j["steps"] = steps_json;
  return j;
}

std::string ReplayResult::render_text() const {
  std::ostringstream out;
  out << "scenario " << scenario_id << '\n';
  for (const auto& s : steps) {
    out << "\n[" << s.index << "] " << s.frame_ref;
    if (s.record.query.task_hint) out << " (" << task_label(*s.record.query.task_hint) << ")";
    out << "\n  Q: " << s.record.query.text << "\n  tags: ";
    for (std::size_t k = 0; k < s.record.tags.tags.size(); ++k) out << (k ? ", " : "") << s.record.tags.tags[k];
    out << "\n  prompt: " << s.record.prompt.final_prompt << "\n  A: " << s.record.answer.final_text << '\n';
  }
  out << '\n' << timings.render_text();
  return out.str();
}

}  // namespace sightline
