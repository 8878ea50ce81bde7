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

#pragma once

#include <memory>
#include <string>

#include "sightline/backends.hpp"

namespace sightline {

/// Splits "http://host:port/prefix" into the scheme-host-port part and a
/// path prefix without trailing slash. Throws Error(kConfig) on bad input.
struct HttpTarget {
  std::string scheme_host_port;
  std::string path_prefix;
};
HttpTarget parse_base_url(const std::string& base_url);

/// POST {base}/v1/tag with {"image": <base64>, "content_type": ...};
/// expects {"tags": [...], "model": ...}.
class HttpTagger : public Tagger {
 public:
  explicit HttpTagger(BackendEndpoint endpoint);
  bool ping() override;

 protected:
  std::vector<std::string> do_tag(const Frame& frame) override;

 private:
  BackendEndpoint endpoint_;
  HttpTarget target_;
};

/// POST {base}/v1/generate with image, prompt and generation params. The
/// response is an SSE stream with one {"seq","text","last"} per event.
class HttpVisionLanguageModel : public VisionLanguageModel {
 public:
  explicit HttpVisionLanguageModel(BackendEndpoint endpoint);
  bool ping() override;

 protected:
  void do_generate(const Frame& frame, std::string_view prompt, const GenerationParams& params,
                   const Emitter& emit) override;

 private:
  BackendEndpoint endpoint_;
  HttpTarget target_;
};

/// POST {base}/v1/transcribe with {"audio": <base64>, "content_type": ...};
/// expects {"text": ...}.
class HttpSpeechToText : public SpeechToText {
 public:
  explicit HttpSpeechToText(BackendEndpoint endpoint);
  bool ping() override;

 protected:
  std::string do_transcribe(std::span<const std::uint8_t> audio, std::string_view content_type) override;

 private:
  BackendEndpoint endpoint_;
  HttpTarget target_;
};

/// POST {base}/v1/synthesize with {"text": ...}; expects audio/wav bytes.
class HttpTextToSpeech : public TextToSpeech {
 public:
  explicit HttpTextToSpeech(BackendEndpoint endpoint);
  bool ping() override;

 protected:
  std::pair<Bytes, std::string> do_synthesize(std::string_view text) override;

 private:
  BackendEndpoint endpoint_;
  HttpTarget target_;
};

}  // namespace sightline
