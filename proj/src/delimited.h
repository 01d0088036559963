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

#ifndef PATHFORGE_SRC_DELIMITED_H_
#define PATHFORGE_SRC_DELIMITED_H_

#include <string>
#include <string_view>
#include <vector>

namespace pathforge {

// Splits delimited text into records. Fields may be double-quoted; quoted
// fields can contain delimiters, doubled quotes and newlines. Handles
// LF and CRLF line endings.
class DelimitedReader {
 public:
  DelimitedReader(std::string_view content, char delimiter)
      : content_(content), delimiter_(delimiter) {}

  // Reads the next non-empty record. Returns false at end of input.
  bool Next(std::vector<std::string> *fields);

  // 1-based line number where the last record started.
  int line() const { return record_line_; }

 private:
  std::string_view content_;
  char delimiter_;
  size_t pos_ = 0;
  int next_line_ = 1;
  int record_line_ = 0;
};

// Quotes a field if it contains the delimiter, a quote or a line break.
std::string QuoteField(std::string_view field, char delimiter);

}  // namespace pathforge

#endif  // PATHFORGE_SRC_DELIMITED_H_
