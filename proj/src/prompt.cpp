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

#include "sightline/prompt.hpp"

#include <fstream>
#include <sstream>

#include "sightline/error.hpp"

namespace sightline {

namespace {

constexpr TaskHint kAllTasks[] = {TaskHint::kSceneUnderstanding, TaskHint::kObjectLocalization,
                                  TaskHint::kRiskAssessment, TaskHint::kFreeform};

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string template_id, std::string body, std::set<TaskHint> applicable_tasks)
    : template_id_(std::move(template_id)), body_(std::move(body)), applicable_tasks_(std::move(applicable_tasks)) {
  if (template_id_.empty()) throw Error(ErrorCode::kConfig, "template id is empty");
  if (body_.empty()) throw Error(ErrorCode::kConfig, "template '" + template_id_ + "' has an empty body");
  auto n = count_occurrences(body_, kUserQueryPlaceholder);
  if (n != 1) {
    throw Error(ErrorCode::kConfig, "template '" + template_id_ + "' must contain exactly one [user_query], found " +
                                        std::to_string(n));
  }
  placeholder_at_ = body_.find(kUserQueryPlaceholder);
}

std::string PromptTemplate::render(std::string_view query) const {
  std::string out;
  out.reserve(body_.size() + query.size());
  out.append(body_, 0, placeholder_at_);
  out.append(query);
  out.append(body_, placeholder_at_ + kUserQueryPlaceholder.size());
  return out;
}

std::string compose_tag_sentence(const std::vector<std::string>& tags) {
  if (tags.empty()) return {};
  std::string out(kTagSentencePrefix);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += ", ";
    out += tags[i];
  }
  out += '.';
  return out;
}

PromptBundle compose_prompt(const TagSet& tags, const UserQuery& query, const PromptTemplate& tmpl) {
  if (query.text.empty()) throw Error(ErrorCode::kPrecondition, "query text is empty");
  PromptBundle bundle;
  bundle.tag_sentence = compose_tag_sentence(tags);
  bundle.template_id = tmpl.template_id();
  bundle.user_query = query.text;
  auto body = tmpl.render(query.text);
  bundle.final_prompt = bundle.tag_sentence.empty() ? std::move(body) : bundle.tag_sentence + " " + body;
  return bundle;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
  auto id = tmpl.template_id();
  templates_.insert_or_assign(id, std::move(tmpl));
  refresh_applicable_tasks();
}

TemplateRegistry TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kConfig, "template directory not found: " + dir.string());
  }
  TemplateRegistry reg;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto body = ss.str();
    if (!body.empty() && body.back() == '\n') body.pop_back();
    if (!body.empty() && body.back() == '\r') body.pop_back();
    reg.templates_.insert_or_assign(entry.path().filename().string(),
                                    PromptTemplate(entry.path().filename().string(), std::move(body)));
  }
  reg.refresh_applicable_tasks();
  return reg;
}

void TemplateRegistry::set_task_mapping(const std::map<TaskHint, std::string>& mapping) {
  for (const auto& [task, id] : mapping) {
    if (!contains(id)) {
      throw Error(ErrorCode::kConfig, "task '" + std::string(to_string(task)) + "' maps to unknown template '" + id + "'");
    }
  }
  for (const auto& [task, id] : mapping) task_mapping_[task] = id;
  refresh_applicable_tasks();
}

const PromptTemplate& TemplateRegistry::get(const std::string& template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end()) throw Error(ErrorCode::kConfig, "unknown template '" + template_id + "'");
  return it->second;
}

const PromptTemplate& TemplateRegistry::select_template(TaskHint task) const {
  auto it = task_mapping_.find(task);
  return get(it == task_mapping_.end() ? std::string(kDefaultTemplateId) : it->second);
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

void TemplateRegistry::refresh_applicable_tasks() {
  for (auto& [_, t] : templates_) t.applicable_tasks_.clear();
  for (auto task : kAllTasks) {
    auto it = task_mapping_.find(task);
    auto id = it == task_mapping_.end() ? std::string(kDefaultTemplateId) : it->second;
    if (auto t = templates_.find(id); t != templates_.end()) t->second.applicable_tasks_.insert(task);
  }
}

}  // namespace sightline
