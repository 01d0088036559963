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

#ifndef PATHFORGE_ERRORS_H_
#define PATHFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pathforge {

// Failure categories shared by every module. The C API maps these onto
// pf_status values one to one.
enum class ErrorCode {
  kIo,
  kSchema,
  kDomain,
  kLinking,
  kInsufficient,
  kTemplate,
  kTransport,
  kContent,
  kNumericGuard,
  kInvalidInput,
};

const char *ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Transport failures carry the number of attempts made before giving up.
class TransportError : public Error {
 public:
  TransportError(const std::string &message, int attempts, bool retryable)
      : Error(ErrorCode::kTransport, message),
        attempts_(attempts),
        retryable_(retryable) {}

  int attempts() const { return attempts_; }
  bool retryable() const { return retryable_; }

 private:
  int attempts_;
  bool retryable_;
};

}  // namespace pathforge

#endif  // PATHFORGE_ERRORS_H_
