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

#include "pathforge/errors.h"

namespace pathforge {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kLinking: return "linking";
    case ErrorCode::kInsufficient: return "insufficient";
    case ErrorCode::kTemplate: return "template";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kContent: return "content";
    case ErrorCode::kNumericGuard: return "numeric-guard";
    case ErrorCode::kInvalidInput: return "invalid-input";
  }
  return "unknown";
}

}  // namespace pathforge
