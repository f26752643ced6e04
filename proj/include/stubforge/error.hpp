// Copyright 2026 The Stubforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stubforge {

enum class ErrorCode {
  // scanner
  RootNotFound,
  NoTestFiles,
  ParseFailure,
  // extractor
  ExtractionEmpty,
  InvariantViolation,
  // promptkit
  BudgetImpossible,
  NoTestFound,
  NoPackage,
  TemplateInvalid,
  // llm-gateway
  ProviderError,
  RetriesExhausted,
  AuthMissing,
  TransientTransport,
  // toolchain
  ToolchainUnavailable,
  Timeout,
  ContractBreach,
  MalformedReport,
  CutNotInReport,
  WorkspaceBusy,
  // metrics-lab
  EmptySample,
  EmptyLedger,
  EmptyRun,
  // cli
  ConfigError,
  RunDirExists,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a typed error code; every failure in the library is
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stubforge
