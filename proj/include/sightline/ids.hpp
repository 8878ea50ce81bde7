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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace sightline {

namespace detail {
std::array<std::uint64_t, 2> random_id_words();
std::string words_to_hex(const std::array<std::uint64_t, 2>& words);
std::array<std::uint64_t, 2> hex_to_words(std::string_view hex);
}  // namespace detail

/// Opaque 128-bit identifier, rendered as 32 lowercase hex digits. The tag
/// parameter keeps session, frame and query identifiers from mixing.
template <typename Tag>
class BasicId {
 public:
  BasicId() = default;

  static BasicId generate() { return BasicId(detail::random_id_words()); }

  /// Throws Error(kValidation) unless `hex` is exactly 32 hex digits.
  static BasicId parse(std::string_view hex) {
    return BasicId(detail::hex_to_words(hex));
  }

  std::string str() const { return detail::words_to_hex(words_); }
  bool empty() const { return words_[0] == 0 && words_[1] == 0; }

  auto operator<=>(const BasicId&) const = default;

  const std::array<std::uint64_t, 2>& words() const { return words_; }

 private:
  explicit BasicId(std::array<std::uint64_t, 2> words) : words_(words) {}
  std::array<std::uint64_t, 2> words_{};
};

struct SessionTag {};
struct FrameTag {};
struct QueryTag {};

using SessionId = BasicId<SessionTag>;
using FrameId = BasicId<FrameTag>;
using QueryId = BasicId<QueryTag>;

}  // namespace sightline

template <typename Tag>
struct std::hash<sightline::BasicId<Tag>> {
  std::size_t operator()(const sightline::BasicId<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.words()[0] ^ (id.words()[1] * 0x9e3779b97f4a7c15ULL));
  }
};
