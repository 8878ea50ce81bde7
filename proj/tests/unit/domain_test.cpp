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

#include <random>
#include <set>

#include "sightline/domain.hpp"
#include "sightline/error.hpp"
#include "sightline/session.hpp"
#include "support.hpp"

using namespace sightline;

namespace {

template <typename T>
void expect_round_trip(const T& value) {
  Json j = value;
  std::string first = j.dump();
  T back = Json::parse(first).get<T>();
  EXPECT_EQ(back, value);
  Json again = back;
  EXPECT_EQ(again.dump(), first);
}

std::string random_text(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> alphabet = {"a", "b", "c", " ", "x", "y", "z", "\"", "\\", "\n",
                                                    "\t", "/", "é", "[", "]", "{", "}", "0", "7", "9"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
  return s;
}

}  // namespace

TEST(Ids, GenerateIsUniqueAndParsesBack) {
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    auto id = SessionId::generate();
    EXPECT_EQ(id.str().size(), 32u);
    EXPECT_EQ(SessionId::parse(id.str()), id);
    EXPECT_TRUE(seen.insert(id.str()).second);
  }
}

TEST(Ids, ParseRejectsMalformed) {
  for (const char* bad : {"", "abc", "0123456789abcdef0123456789abcdeg", "0123456789ABCDEF0123456789ABCDEF",
                          "0123456789abcdef0123456789abcdef0"}) {
    try {
      SessionId::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kValidation);
    }
  }
}

TEST(Domain, EnumNamesRoundTrip) {
  for (auto t : {TaskHint::kSceneUnderstanding, TaskHint::kObjectLocalization, TaskHint::kRiskAssessment,
                 TaskHint::kFreeform}) {
    EXPECT_EQ(parse_task_hint(to_string(t)), t);
  }
  EXPECT_EQ(task_label(TaskHint::kRiskAssessment), "Risk Assessment");
  EXPECT_EQ(parse_modality("audio"), Modality::kAudio);
  EXPECT_THROW(parse_modality("video"), Error);
  for (int c = 0; c <= static_cast<int>(ErrorCode::kUnavailable); ++c) {
    auto code = static_cast<ErrorCode>(c);
    EXPECT_EQ(parse_error_code(to_string(code)), code);
  }
}

TEST(Domain, NormalizeTags) {
  EXPECT_EQ(normalize_tags({" Street", "people ", "", "STREET", "shop", "  "}),
            (std::vector<std::string>{"street", "people", "shop"}));
  EXPECT_TRUE(normalize_tags({}).empty());
}

TEST(Domain, GenerationParamsDefaultsAndValidation) {
  GenerationParams p;
  EXPECT_EQ(p.min_length, 1);
  EXPECT_EQ(p.max_length, 200);
  EXPECT_EQ(p.beam_width, 5);
  EXPECT_DOUBLE_EQ(p.length_penalty, 1.0);
  EXPECT_DOUBLE_EQ(p.repetition_penalty, 3.0);
  EXPECT_DOUBLE_EQ(p.temperature, 1.0);
  EXPECT_NO_THROW(p.validate());

  auto expect_config_error = [](GenerationParams q) {
    try {
      q.validate();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
  };
  GenerationParams q = p;
  q.beam_width = 0;
  expect_config_error(q);
  q = p;
  q.min_length = 300;
  expect_config_error(q);
  q = p;
  q.temperature = 0;
  expect_config_error(q);
}

TEST(Domain, UserQueryValidation) {
  UserQuery q;
  q.text = "Can you describe the environment around?";
  EXPECT_NO_THROW(q.validate());
  q.modality = Modality::kAudio;
  EXPECT_THROW(q.validate(), Error);
  q.transcription = TranscriptionRecord{"audio/wav", q.text, 12.5};
  EXPECT_NO_THROW(q.validate());
  q.text.clear();
  EXPECT_THROW(q.validate(), Error);
}

TEST(Domain, ManualScoreRange) {
  EXPECT_NO_THROW((ManualScore{"a", TaskHint::kRiskAssessment, 10}.validate()));
  EXPECT_NO_THROW((ManualScore{"a", TaskHint::kRiskAssessment, 0}.validate()));
  try {
    ManualScore{"a", TaskHint::kRiskAssessment, 11}.validate();
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRange);
  }
}

TEST(Domain, StageTimingsRejectNegative) {
  StageTimings t;
  t.tagging_ms = -1;
  EXPECT_THROW(t.validate(), Error);
}

TEST(DomainJson, RoundTripsAreByteIdentical) {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 200; ++iter) {
    Frame f;
    f.frame_id = FrameId::generate();
    f.session_id = SessionId::generate();
    f.captured_at = static_cast<TimestampMs>(rng() % 100000);
    f.content_type = "image/png";
    auto raw = random_text(rng, 40);
    f.bytes = Bytes(raw.begin(), raw.end());
    expect_round_trip(f);

    UserQuery q;
    q.query_id = QueryId::generate();
    q.session_id = f.session_id;
    q.received_at = f.captured_at + 1;
    q.text = random_text(rng, 30) + "q";
    if (iter % 2) {
      q.modality = Modality::kAudio;
      q.transcription = TranscriptionRecord{"audio/wav", q.text, static_cast<double>(rng() % 1000) / 8};
    }
    if (iter % 3) q.task_hint = TaskHint::kObjectLocalization;
    expect_round_trip(q);

    TagSet tags{{random_text(rng, 8), "street"}, f.frame_id, static_cast<double>(rng() % 997) / 10};
    expect_round_trip(tags);

    PromptBundle pb{"The image may contain elements of street.", "pblv_assistant", q.text, random_text(rng, 60)};
    expect_round_trip(pb);

    GenerationParams gp;
    gp.max_length = 10 + static_cast<int>(rng() % 100);
    gp.temperature = 0.25 * (1 + rng() % 8);
    expect_round_trip(gp);

    AnswerStream as;
    as.query_id = q.query_id;
    for (int k = 0; k < static_cast<int>(rng() % 5); ++k) as.chunks.push_back(Chunk{k, random_text(rng, 6), 100 + k});
    as.final_text = as.concatenated();
    as.status = iter % 4 ? StreamStatus::kComplete : StreamStatus::kFailed;
    as.timings.tagging_ms = 40.125;
    as.timings.first_token_ms = 240.5;
    if (iter % 5 == 0) as.timings.tts_ms = 3.75;
    as.error = iter % 4 ? "" : "cancelled";
    expect_round_trip(as);

    expect_round_trip(ManualScore{random_text(rng, 5), TaskHint::kSceneUnderstanding, (rng() % 101) / 10.0});

    QueryRecord rec;
    rec.query = q;
    rec.selected_frame = f.frame_id;
    rec.tags = tags;
    rec.prompt = pb;
    rec.answer = as;
    if (iter % 2) rec.audio_ref = q.query_id.str() + "/audio";
    Json j = rec;
    auto back = Json::parse(j.dump()).get<QueryRecord>();
    Json again = back;
    EXPECT_EQ(again.dump(), j.dump());
  }
}

TEST(DomainJson, FrameBytesAreBase64) {
  Frame f = testing_support::frame_of(testing_support::to_bytes("hi!"));
  Json j = f;
  EXPECT_EQ(j["bytes"], "aGkh");
}
