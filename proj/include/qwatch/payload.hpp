#pragma once

// JSON shapes shared by the HTTP service and the command line tool.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qwatch/bank.hpp"
#include "qwatch/chain.hpp"
#include "qwatch/oracle.hpp"
#include "qwatch/scoring.hpp"

namespace qwatch::payload {

using Json = nlohmann::ordered_json;

/// Malformed selection / results request document.
class RequestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// {"section_ids": [...], "answer_ids": [...]}; unknown keys rejected.
Selection parse_selection(std::string_view text);
Json selection_json(const Selection& selection);

Json sections(const ValidatedBank& bank);

/// Risk scores are never part of this payload.
Json questions(const ValidatedBank& bank, std::size_t section);

Json result(const AssessmentResult& result, bool include_risk_value);
Json violations(const std::vector<Violation>& violations);
Json error(std::string_view code, std::string_view message);
Json not_found(std::string_view id, std::string_view message);

Json report(const oracle::AnswerSpaceReport& report);
Json diagnostics(const BankDiagnostics& diagnostics);

}  // namespace qwatch::payload
