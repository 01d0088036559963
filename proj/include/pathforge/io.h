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

#ifndef PATHFORGE_IO_H_
#define PATHFORGE_IO_H_

#include <string>
#include <string_view>

namespace pathforge {

// Throws Error(kIo) when the file cannot be opened.
std::string ReadFile(const std::string &path);

// Writes to a sibling temporary file and renames it into place. On any
// failure the temporary file is removed and Error(kIo) is thrown, so the
// destination is either the old content or the complete new content.
void WriteFileAtomic(const std::string &path, std::string_view content);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::string &path);

}  // namespace pathforge

#endif  // PATHFORGE_IO_H_
