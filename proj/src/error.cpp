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

#include "stubforge/error.hpp"

namespace stubforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::NoTestFiles: return "NoTestFiles";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::ExtractionEmpty: return "ExtractionEmpty";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::BudgetImpossible: return "BudgetImpossible";
    case ErrorCode::NoTestFound: return "NoTestFound";
    case ErrorCode::NoPackage: return "NoPackage";
    case ErrorCode::TemplateInvalid: return "TemplateInvalid";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::AuthMissing: return "AuthMissing";
    case ErrorCode::TransientTransport: return "TransientTransport";
    case ErrorCode::ToolchainUnavailable: return "ToolchainUnavailable";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ContractBreach: return "ContractBreach";
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::CutNotInReport: return "CutNotInReport";
    case ErrorCode::WorkspaceBusy: return "WorkspaceBusy";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyLedger: return "EmptyLedger";
    case ErrorCode::EmptyRun: return "EmptyRun";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::RunDirExists: return "RunDirExists";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace stubforge
