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

#include "sightline/error.hpp"
#include "sightline/session.hpp"
#include "support.hpp"

using namespace sightline;
using namespace testing_support;

TEST(Session, NewSessionIsEmptyAndUnique) {
  auto cfg = GatewayConfig::mock_defaults();
  auto a = new_session(cfg, 10);
  auto b = new_session(cfg, 10);
  EXPECT_TRUE(a.frames.empty());
  EXPECT_TRUE(a.queries.empty());
  EXPECT_NE(a.session_id, b.session_id);
  EXPECT_EQ(a.created_at, 10);
}

TEST(Session, InvalidConfigRefused) {
  auto cfg = GatewayConfig::mock_defaults();
  cfg.generation.beam_width = 0;
  EXPECT_THROW(new_session(cfg), Error);
}

TEST(Session, RingBufferEvictsOldest) {
  auto s = new_session(GatewayConfig::mock_defaults(), 0);
  std::vector<FrameId> ids;
  ids.push_back(s.append_frame("image/png", fake_image("0"), 1)->frame_id);
  EXPECT_EQ(s.frames.size(), 1u);
  for (int i = 1; i < 33; ++i) ids.push_back(s.append_frame("image/png", fake_image(std::to_string(i)), i + 1)->frame_id);
  ASSERT_EQ(s.frames.size(), 32u);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_EQ(s.frames[i]->frame_id, ids[i + 1]);
}

TEST(Session, TimestampsStrictlyIncrease) {
  auto s = new_session(GatewayConfig::mock_defaults(), 0);
  s.append_frame("image/png", fake_image("a"), 50);
  s.append_frame("image/png", fake_image("b"), 50);
  s.append_frame("image/png", fake_image("c"), 10);
  EXPECT_EQ(s.frames[0]->captured_at, 50);
  EXPECT_EQ(s.frames[1]->captured_at, 51);
  EXPECT_EQ(s.frames[2]->captured_at, 52);
  EXPECT_THROW(s.append_frame("image/png", {}, 60), Error);
}

TEST(SelectFrame, Examples) {
  auto s = new_session(GatewayConfig::mock_defaults(), 0);
  for (TimestampMs t : {100, 200, 300}) s.append_frame("image/png", fake_image(std::to_string(t)), t);
  EXPECT_EQ(select_frame(s, 250)->captured_at, 200);
  EXPECT_EQ(select_frame(s, 300)->captured_at, 300);
  EXPECT_EQ(select_frame(s, 50)->captured_at, 100);
  EXPECT_EQ(select_frame(s, 1000)->captured_at, 300);
}

TEST(SelectFrame, EmptyBufferIsNoFrame) {
  auto s = new_session(GatewayConfig::mock_defaults(), 0);
  try {
    select_frame(s, 10);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFrame);
  }
}

TEST(SelectFrame, RandomizedAgainstLinearScan) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 500; ++iter) {
    auto cfg = GatewayConfig::mock_defaults();
    cfg.frame_buffer_capacity = 1 + rng() % 8;
    auto s = new_session(cfg, 0);
    int n = 1 + rng() % 12;
    TimestampMs t = rng() % 50;
    for (int i = 0; i < n; ++i) {
      t += rng() % 20;
      s.append_frame("image/png", fake_image(std::to_string(i)), t);
    }
    TimestampMs at = static_cast<TimestampMs>(rng() % 300);
    FramePtr expected = s.frames.front();
    for (const auto& f : s.frames) {
      if (f->captured_at <= at) expected = f;
    }
    EXPECT_EQ(select_frame(s, at), expected);
  }
}
