/*
 * Copyright 2026 The DBOM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DBOM_ERROR_HPP_
#define DBOM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dbom {

enum class ErrorCode {
  kCanonicalization,
  kConstruction,
  kValidation,
  kFormat,
  kKeyUnknown,
  kSignatureMismatch,
  kAttestationRefused,
  kNotFound,
  kLoad,
  kSplit,
  kDivergence,
  kMetrics,
  kModelTampered,
  kOutOfVocabulary,
  kMissingAttribute,
  kUnknownConcept,
  kRuleSyntax,
  kStorage,
  kStage,
  kConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the toolkit carries a machine-readable code so that
// frontends can map it onto exit codes and HTTP statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dbom

#endif  // DBOM_ERROR_HPP_
