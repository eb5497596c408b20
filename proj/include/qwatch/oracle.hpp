#pragma once

// Brute-force answer-space explorer. Deliberately shares no evaluation code
// with the chain and scoring engines so it can be used to check them.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qwatch/bank.hpp"
#include "qwatch/chain.hpp"
#include "qwatch/scoring.hpp"

namespace qwatch::oracle {

inline constexpr std::size_t kDefaultLimit = 1'000'000;

struct EnumerationStats {
  std::size_t emitted = 0;
  bool truncated = false;
};

/// Visits every consistent selection over `section_ids` (bank order,
/// questions in bank order, per question: no answer first, then single
/// options in order or multiple-choice subsets by ascending bitmask).
/// Stops after `limit` selections and reports truncation if more exist.
/// Throws UnknownId for unknown sections and std::invalid_argument for a
/// zero limit.
EnumerationStats enumerate_assignments(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                                       std::size_t limit, const std::function<void(const Selection&)>& visit);

struct Enumeration {
  std::vector<Selection> selections;
  bool truncated = false;
};

Enumeration enumerate_assignments(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                                  std::size_t limit = kDefaultLimit);

/// Risk percentage by literal summation. Throws InconsistentSelection when an
/// answer is unknown, outside the selected sections, on a hidden question, or
/// breaks single-choice arity.
double oracle_score(const ValidatedBank& bank, const Selection& selection);

struct AnswerSpaceReport {
  std::size_t assignments_enumerated = 0;
  bool truncated = false;
  double min_risk = 0.0;
  double max_risk = 0.0;
  std::map<RiskCategory, std::size_t> category_counts;
  std::map<std::string, std::size_t> per_recommendation_trigger_counts;
};

AnswerSpaceReport report(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                         std::size_t limit = kDefaultLimit);

}  // namespace qwatch::oracle
