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

#ifndef PATHFORGE_TEXT_H_
#define PATHFORGE_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace pathforge {

// Lowercases ASCII letters, turns ASCII punctuation into spaces, collapses
// whitespace runs and trims. Bytes >= 0x80 are kept verbatim so UTF-8 names
// survive unchanged.
std::string NormalizeSurface(std::string_view text);

// A maximal run of word bytes in the original text.
struct Token {
  size_t start = 0;
  size_t end = 0;
  std::string normalized;
};

// Tokens consistent with NormalizeSurface: joining the normalized tokens of
// any contiguous token range with single spaces equals NormalizeSurface of
// the corresponding source slice.
std::vector<Token> Tokenize(std::string_view text);

}  // namespace pathforge

#endif  // PATHFORGE_TEXT_H_
