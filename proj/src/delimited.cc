// Copyright 2026 The PathForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "delimited.h"

namespace pathforge {

bool DelimitedReader::Next(std::vector<std::string> *fields) {
  fields->clear();
  while (pos_ < content_.size()) {
    record_line_ = next_line_;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos_ < content_.size()) {
      char c = content_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < content_.size() && content_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          in_quotes = false;
          ++pos_;
          continue;
        }
        if (c == '\n') ++next_line_;
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"' && field.empty()) {
        in_quotes = true;
        any = true;
        ++pos_;
        continue;
      }
      if (c == delimiter_) {
        fields->push_back(std::move(field));
        field.clear();
        any = true;
        ++pos_;
        continue;
      }
      if (c == '\r' && pos_ + 1 < content_.size() && content_[pos_ + 1] == '\n') {
        ++pos_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        ++next_line_;
        break;
      }
      field.push_back(c);
      any = true;
      ++pos_;
    }
    if (!any && field.empty()) {
      fields->clear();
      continue;  // blank line
    }
    fields->push_back(std::move(field));
    return true;
  }
  return false;
}

std::string QuoteField(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) ==
      std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace pathforge
