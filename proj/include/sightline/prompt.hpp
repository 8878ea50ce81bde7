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

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sightline/domain.hpp"

namespace sightline {

inline constexpr std::string_view kUserQueryPlaceholder = "[user_query]";
inline constexpr std::string_view kTagSentencePrefix = "The image may contain elements of ";
inline constexpr std::string_view kDefaultTemplateId = "pblv_assistant";

class PromptTemplate {
 public:
  /// Throws Error(kConfig) unless the body is non-empty and holds exactly
  /// one "[user_query]".
  PromptTemplate(std::string template_id, std::string body, std::set<TaskHint> applicable_tasks = {});

  const std::string& template_id() const { return template_id_; }
  const std::string& body() const { return body_; }
  const std::set<TaskHint>& applicable_tasks() const { return applicable_tasks_; }

  /// Body with the placeholder replaced once by `query`. The query text
  /// itself is never scanned for placeholders.
  std::string render(std::string_view query) const;

  bool operator==(const PromptTemplate&) const = default;

 private:
  friend class TemplateRegistry;
  std::string template_id_;
  std::string body_;
  std::set<TaskHint> applicable_tasks_;
  std::size_t placeholder_at_ = 0;
};

/// "The image may contain elements of a, b, c." or "" for no tags.
std::string compose_tag_sentence(const std::vector<std::string>& tags);
inline std::string compose_tag_sentence(const TagSet& tags) { return compose_tag_sentence(tags.tags); }

/// Tag sentence first, then the rendered template, separated by one space
/// (no separator when there are no tags).
PromptBundle compose_prompt(const TagSet& tags, const UserQuery& query, const PromptTemplate& tmpl);

/// Query templates keyed by id, plus the task -> template mapping.
class TemplateRegistry {
 public:
  void add(PromptTemplate tmpl);

  /// Loads every regular file in `dir`; the filename is the template id and
  /// the contents are the body (one trailing newline is dropped).
  static TemplateRegistry load_directory(const std::filesystem::path& dir);

  /// Binds tasks to template ids. Tasks left out keep the default mapping
  /// (every task -> "pblv_assistant"). Throws Error(kConfig) on ids that
  /// are not registered.
  void set_task_mapping(const std::map<TaskHint, std::string>& mapping);

  const PromptTemplate& get(const std::string& template_id) const;
  const PromptTemplate& select_template(TaskHint task) const;
  bool contains(const std::string& template_id) const { return templates_.count(template_id) != 0; }
  std::vector<std::string> ids() const;

  bool operator==(const TemplateRegistry&) const = default;

 private:
  void refresh_applicable_tasks();

  std::map<std::string, PromptTemplate> templates_;
  std::map<TaskHint, std::string> task_mapping_;
};

}  // namespace sightline
