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

#include <fstream>
#include <thread>

#include "sightline/error.hpp"
#include "sightline/gateway.hpp"
#include "sightline/wav.hpp"
#include "support.hpp"

using namespace sightline;
using namespace testing_support;

namespace {

const std::string kGateQuery = "where the subway gate is";
const std::string kGateAnswer = "There are two gates. One is on your left and the other is on your right.";

struct Collected {
  std::vector<ChunkEvent> chunks;
  std::optional<DoneEvent> done;
  std::optional<ErrorEvent> error;
  std::optional<double> first_chunk_at_ms;
  Stopwatch clock;

  ResponseSink sink() {
    return [this](const ResponseEvent& ev) {
      if (auto* c = std::get_if<ChunkEvent>(&ev)) {
        if (!first_chunk_at_ms) first_chunk_at_ms = clock.elapsed_ms();
        chunks.push_back(*c);
      }
      if (auto* d = std::get_if<DoneEvent>(&ev)) done = *d;
      if (auto* e = std::get_if<ErrorEvent>(&ev)) error = *e;
      return true;
    };
  }
  std::string text() const {
    std::string s;
    for (const auto& c : chunks) s += c.text;
    return s;
  }
};

class GatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto set = std::make_shared<MockFixtureSet>();
    set->add_tagger(digest_of(gates_), TaggerFixture{{"subway", "gate", "turnstile"}, 5});
    set->add_vlm(digest_of(gates_), VlmFixture{{"There are two gates. ", "One is on your left ",
                                                "and the other is on your right."},
                                               10, 2, std::nullopt});
    set->add_asr(digest_of(gate_audio_), AsrFixture{kGateQuery, 4});
    set->add_tagger(digest_of(slow_), TaggerFixture{{"slow"}, 0});
    VlmFixture slow_answer;
    for (int i = 0; i < 30; ++i) slow_answer.chunks.push_back("w ");
    slow_answer.inter_chunk_delay_ms = 10;
    set->add_vlm(digest_of(slow_), slow_answer);
    set->add_tagger(digest_of(broken_), TaggerFixture{{"x"}, 0});
    set->add_vlm(digest_of(broken_), VlmFixture{{"par", "tial", "never"}, 0, 0, 2});
    fixtures_ = set;
    gw_ = mock_gateway(fixtures_);
  }

  Bytes gates_ = fake_image("gates");
  Bytes slow_ = fake_image("slow");
  Bytes broken_ = fake_image("broken");
  Bytes gate_audio_ = make_sine_wav(200);
  std::shared_ptr<MockFixtureSet> fixtures_;
  std::unique_ptr<Gateway> gw_;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kProtocol;
}

}  // namespace

TEST_F(GatewayTest, TextQueryStreamsAnswerWithTimings) {
  auto sid = gw_->create_session();
  auto ingest = gw_->ingest_frame(sid, "image/png", gates_);
  Collected c;
  auto rec = gw_->handle_query(sid, Modality::kText, to_bytes(kGateQuery), "text/plain",
                               TaskHint::kObjectLocalization, c.sink());
  EXPECT_FALSE(c.error);
  ASSERT_TRUE(c.done);
  EXPECT_EQ(c.text(), kGateAnswer);
  for (std::size_t i = 0; i < c.chunks.size(); ++i) EXPECT_EQ(c.chunks[i].seq, static_cast<int>(i));
  ASSERT_TRUE(c.done->timings.tagging_ms && c.done->timings.first_token_ms);
  EXPECT_GE(*c.done->timings.tagging_ms, 5.0);
  EXPECT_GE(*c.done->timings.first_token_ms, 10.0);
  EXPECT_FALSE(c.done->timings.asr_ms);
  EXPECT_EQ(c.done->query_id, rec.query.query_id);
  EXPECT_EQ(rec.selected_frame, ingest.frame_id);
  EXPECT_EQ(rec.answer.status, StreamStatus::kComplete);
  EXPECT_EQ(rec.answer.final_text, kGateAnswer);
  EXPECT_EQ(rec.prompt.final_prompt.rfind(compose_tag_sentence(rec.tags), 0), 0u);
  EXPECT_NE(rec.prompt.final_prompt.find(kGateQuery), std::string::npos);
  auto stored = gw_->find_record(sid, rec.query.query_id);
  ASSERT_TRUE(stored);
  EXPECT_EQ(stored->answer.final_text, kGateAnswer);
}

TEST_F(GatewayTest, AudioQueryMatchesTextQuery) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", gates_);
  Collected text, audio;
  auto r1 = gw_->handle_query(sid, Modality::kText, to_bytes(kGateQuery), "text/plain", TaskHint::kObjectLocalization,
                              text.sink());
  auto r2 = gw_->handle_query(sid, Modality::kAudio, gate_audio_, "audio/wav", TaskHint::kObjectLocalization,
                              audio.sink());
  EXPECT_EQ(r1.prompt.final_prompt, r2.prompt.final_prompt);
  EXPECT_EQ(r1.tags.tags, r2.tags.tags);
  EXPECT_EQ(text.text(), audio.text());
  EXPECT_EQ(r2.query.text, kGateQuery);
  ASSERT_TRUE(r2.query.transcription);
  ASSERT_TRUE(audio.done && audio.done->timings.asr_ms);
  EXPECT_GE(*audio.done->timings.asr_ms, 4.0);
}

TEST_F(GatewayTest, TimingSanityAgainstWallClock) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", gates_);
  Collected c;
  gw_->handle_query(sid, Modality::kAudio, gate_audio_, "audio/wav", std::nullopt, c.sink());
  ASSERT_TRUE(c.done && c.first_chunk_at_ms);
  const auto& t = c.done->timings;
  EXPECT_LE(*t.asr_ms + *t.tagging_ms + *t.first_token_ms, *c.first_chunk_at_ms + 50.0);
}

TEST_F(GatewayTest, AdmissionErrors) {
  auto sid = gw_->create_session();
  auto ghost = SessionId::generate();
  EXPECT_EQ(code_of([&] { gw_->ingest_frame(ghost, "image/png", gates_); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { gw_->open_query(ghost, Modality::kText, to_bytes("q")); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { gw_->open_query(sid, Modality::kText, {}); }), ErrorCode::kPrecondition);
  EXPECT_EQ(code_of([&] { gw_->ingest_frame(sid, "image/png", {}); }), ErrorCode::kPrecondition);
}

TEST_F(GatewayTest, SecondQueryWhileInFlightIsBusy) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", gates_);
  {
    auto ticket = gw_->open_query(sid, Modality::kText, to_bytes("first"));
    EXPECT_EQ(code_of([&] { gw_->open_query(sid, Modality::kText, to_bytes("second")); }), ErrorCode::kBusy);
  }
  EXPECT_NO_THROW(gw_->open_query(sid, Modality::kText, to_bytes("third")));
}

TEST_F(GatewayTest, BusyDuringStreaming) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", slow_);
  std::atomic<bool> started{false};
  std::thread runner([&] {
    gw_->handle_query(sid, Modality::kText, to_bytes("q"), "", std::nullopt, [&](const ResponseEvent&) {
      started = true;
      return true;
    });
  });
  while (!started) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  EXPECT_EQ(code_of([&] { gw_->open_query(sid, Modality::kText, to_bytes("again")); }), ErrorCode::kBusy);
  runner.join();
}

TEST_F(GatewayTest, NoFrameIsStageError) {
  auto sid = gw_->create_session();
  Collected c;
  auto rec = gw_->handle_query(sid, Modality::kText, to_bytes("hello"), "", std::nullopt, c.sink());
  ASSERT_TRUE(c.error);
  EXPECT_EQ(c.error->stage, "frame");
  EXPECT_EQ(c.error->code, ErrorCode::kNoFrame);
  EXPECT_EQ(rec.failed_stage, "frame");
  EXPECT_EQ(rec.answer.status, StreamStatus::kFailed);
}

TEST_F(GatewayTest, TaggerFailureNamesStage) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", fake_image("unscripted"));
  Collected c;
  gw_->handle_query(sid, Modality::kText, to_bytes("hello"), "", std::nullopt, c.sink());
  ASSERT_TRUE(c.error);
  EXPECT_EQ(c.error->stage, "tagging");
  EXPECT_EQ(c.error->code, ErrorCode::kProtocol);
}

TEST_F(GatewayTest, UnscriptedAudioIsTranscriptionFailure) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", gates_);
  Collected c;
  gw_->handle_query(sid, Modality::kAudio, make_sine_wav(33), "audio/wav", std::nullopt, c.sink());
  ASSERT_TRUE(c.error);
  EXPECT_EQ(c.error->stage, "asr");
  EXPECT_EQ(c.error->code, ErrorCode::kTranscriptionFailed);
}

TEST_F(GatewayTest, ConsumerGoneCancelsGeneration) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", slow_);
  int seen = 0;
  auto rec = gw_->handle_query(sid, Modality::kText, to_bytes("q"), "", std::nullopt,
                               [&](const ResponseEvent& ev) { return !std::holds_alternative<ChunkEvent>(ev) || ++seen < 3; });
  EXPECT_EQ(rec.answer.status, StreamStatus::kFailed);
  EXPECT_LT(rec.answer.chunks.size(), 30u);
  EXPECT_NO_THROW(gw_->open_query(sid, Modality::kText, to_bytes("next")));
}

TEST_F(GatewayTest, AnswerAudioIsCachedAndGuarded) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", gates_);
  auto rec = gw_->handle_query(sid, Modality::kText, to_bytes(kGateQuery), "", std::nullopt, nullptr);
  auto a1 = gw_->get_answer_audio(sid, rec.query.query_id);
  auto a2 = gw_->get_answer_audio(sid, rec.query.query_id);
  EXPECT_EQ(a1.content_type, "audio/wav");
  EXPECT_EQ(a1.audio, a2.audio);
  EXPECT_DOUBLE_EQ(parse_wav(a1.audio).duration_ms(), MockTextToSpeech::duration_ms_for(kGateAnswer));
  auto stored = gw_->find_record(sid, rec.query.query_id);
  EXPECT_EQ(stored->audio_ref, rec.query.query_id.str() + "/audio");
  EXPECT_TRUE(stored->answer.timings.tts_ms);

  EXPECT_EQ(code_of([&] { gw_->get_answer_audio(sid, QueryId::generate()); }), ErrorCode::kNotFound);

  gw_->ingest_frame(sid, "image/png", broken_);
  auto failed = gw_->handle_query(sid, Modality::kText, to_bytes("q"), "", std::nullopt, nullptr);
  EXPECT_EQ(failed.answer.status, StreamStatus::kFailed);
  EXPECT_EQ(failed.answer.final_text, "partial");
  EXPECT_EQ(code_of([&] { gw_->get_answer_audio(sid, failed.query.query_id); }), ErrorCode::kAnswerFailed);
}

TEST_F(GatewayTest, AudioNotReadyWhileStreaming) {
  auto sid = gw_->create_session();
  gw_->ingest_frame(sid, "image/png", slow_);
  std::atomic<bool> started{false};
  QueryId qid;
  auto ticket = gw_->open_query(sid, Modality::kText, to_bytes("q"));
  qid = ticket.query_id();
  std::thread runner([&, t = std::move(ticket)]() mutable {
    t.run([&](const ResponseEvent&) {
      started = true;
      return true;
    });
  });
  while (!started) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  EXPECT_EQ(code_of([&] { gw_->get_answer_audio(sid, qid); }), ErrorCode::kNotReady);
  runner.join();
  EXPECT_NO_THROW(gw_->get_answer_audio(sid, qid));
}

TEST_F(GatewayTest, FailingSessionDoesNotDisturbAnother) {
  auto good = gw_->create_session();
  auto bad = gw_->create_session();
  gw_->ingest_frame(good, "image/png", slow_);
  gw_->ingest_frame(bad, "image/png", broken_);
  Collected good_events;
  std::thread t([&] {
    gw_->handle_query(good, Modality::kText, to_bytes("q"), "", std::nullopt, good_events.sink());
  });
  for (int i = 0; i < 5; ++i) {
    Collected c;
    gw_->handle_query(bad, Modality::kText, to_bytes("q"), "", std::nullopt, c.sink());
    EXPECT_TRUE(c.error);
  }
  t.join();
  EXPECT_FALSE(good_events.error);
  EXPECT_EQ(good_events.chunks.size(), 30u);
  EXPECT_TRUE(good_events.done);
}

TEST_F(GatewayTest, EvictionWritesSessionLog) {
  auto dir = temp_dir("evict");
  auto cfg = GatewayConfig::mock_defaults();
  cfg.session_ttl_ms = 1000;
  cfg.session_log = dir / "sessions.ndjson";
  auto gw = mock_gateway(fixtures_, cfg);
  auto sid = gw->create_session();
  gw->ingest_frame(sid, "image/png", gates_);
  gw->handle_query(sid, Modality::kText, to_bytes(kGateQuery), "", TaskHint::kObjectLocalization, nullptr);
  EXPECT_EQ(gw->evict_expired(monotonic_now_ms()), 0u);
  EXPECT_EQ(gw->evict_expired(monotonic_now_ms() + 5000), 1u);
  EXPECT_EQ(gw->session_count(), 0u);
  EXPECT_EQ(code_of([&] { gw->ingest_frame(sid, "image/png", gates_); }), ErrorCode::kNotFound);
  std::ifstream log(*cfg.session_log);
  std::string line;
  ASSERT_TRUE(std::getline(log, line));
  auto j = Json::parse(line);
  EXPECT_EQ(j["session_id"], sid.str());
  EXPECT_NO_THROW(gw->stage_report());
  std::filesystem::remove_all(dir);
}

TEST_F(GatewayTest, HealthyWithMocks) { EXPECT_TRUE(gw_->healthy()); }

TEST(StageReport, InjectedDelaysReproduced) {
  auto image = fake_image("risk");
  auto set = std::make_shared<MockFixtureSet>();
  set->add_tagger(digest_of(image), TaggerFixture{{"traffic light"}, 36});
  set->add_vlm(digest_of(image), VlmFixture{{"Yes, it is risky."}, 241, 0, std::nullopt});
  auto gw = mock_gateway(set);
  auto sid = gw->create_session();
  gw->ingest_frame(sid, "image/png", image);
  gw->handle_query(sid, Modality::kText, to_bytes("Is there a risk for me to continue moving forward?"), "",
                   TaskHint::kRiskAssessment, nullptr);
  auto rep = gw->stage_report(sid);
  const auto* row = rep.row(TaskHint::kRiskAssessment);
  ASSERT_NE(row, nullptr);
  EXPECT_GE(*row->mean.tagging_ms, 36.0);
  EXPECT_LT(*row->mean.tagging_ms, 56.0);
  EXPECT_GE(*row->mean.first_token_ms, 241.0);
  EXPECT_LT(*row->mean.first_token_ms, 261.0);
  auto text = rep.render_text();
  EXPECT_NE(text.find("Scene Understanding"), std::string::npos);
  EXPECT_NE(text.find("Object Localization"), std::string::npos);
  EXPECT_NE(text.find("Risk Assessment"), std::string::npos);
  EXPECT_NE(text.find("0.03"), std::string::npos);
}

TEST(StageReport, EmptyIsError) {
  try {
    build_stage_report({});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyReport);
  }
  auto gw = mock_gateway(std::make_shared<MockFixtureSet>());
  auto sid = gw->create_session();
  EXPECT_THROW(gw->stage_report(sid), Error);
}

TEST(StageReport, MeansPerTask) {
  StageTimings a, b, c;
  a.tagging_ms = 40;
  a.first_token_ms = 300;
  b.tagging_ms = 44;
  b.first_token_ms = 200;
  c.tagging_ms = 10;
  c.first_token_ms = 100;
  auto rep = build_stage_report({{TaskHint::kSceneUnderstanding, a},
                                 {TaskHint::kSceneUnderstanding, b},
                                 {TaskHint::kRiskAssessment, c}});
  const auto* su = rep.row(TaskHint::kSceneUnderstanding);
  ASSERT_NE(su, nullptr);
  EXPECT_EQ(su->count, 2u);
  EXPECT_DOUBLE_EQ(*su->mean.tagging_ms, 42.0);
  EXPECT_DOUBLE_EQ(*su->mean.first_token_ms, 250.0);
  EXPECT_EQ(rep.row(TaskHint::kObjectLocalization), nullptr);
  auto text = rep.render_text({{TaskHint::kRiskAssessment, 9.4}});
  EXPECT_NE(text.find("Score of 10"), std::string::npos);
  EXPECT_NE(text.find("9.40"), std::string::npos);
  EXPECT_NE(text.find("0.0420"), std::string::npos);
  EXPECT_NE(text.find("0.2500"), std::string::npos);
  auto j = rep.to_json();
  EXPECT_TRUE(j.is_object() || j.is_array());
}
