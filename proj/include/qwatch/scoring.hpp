#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwatch/bank.hpp"
#include "qwatch/chain.hpp"

namespace qwatch {

inline constexpr std::size_t kTopRecommendations = 5;

enum class RiskCategory { low, medium, high };

std::string_view to_string(RiskCategory category);

/// Maximum a question can add to the denominator: the largest answer score
/// for single choice, the sum of all answer scores for multiple choice.
int question_cap(const Question& question);

struct QuestionContribution {
  std::string question_id;
  int contribution = 0;
  int cap = 0;

  bool operator==(const QuestionContribution&) const = default;
};

/// Terms of the risk ratio over the in-scope (visible) questions.
struct ScoreBreakdown {
  long numerator = 0;
  long denominator = 0;
  std::vector<QuestionContribution> per_question;
  double risk_percent = 0.0;
};

/// Throws InconsistentSelection if check_selection reports anything.
ScoreBreakdown compute_breakdown(const ValidatedBank& bank, const Selection& selection);

/// Rounds half away from zero, then low <= 33 < medium <= 59 < high.
/// Throws std::domain_error outside [0, 100].
RiskCategory categorize(double risk_percent);

std::string_view category_explanation(RiskCategory category);

struct TriggeredRecommendation {
  std::string recommendation_id;
  std::string question_id;
  std::string text;
  int importance = 0;
  std::optional<std::string> resource_link;

  bool operator==(const TriggeredRecommendation&) const = default;
};

/// Importance descending, ties in bank declaration order, one entry per
/// recommendation.
std::vector<TriggeredRecommendation> triggered_recommendations(const ValidatedBank& bank,
                                                               const Selection& selection);

struct AssessmentResult {
  ScoreBreakdown breakdown;
  RiskCategory risk_category = RiskCategory::low;
  std::string category_explanation;
  std::vector<TriggeredRecommendation> recommendations_all;

  double risk_percent() const { return breakdown.risk_percent; }

  /// The first min(5, n) recommendations.
  std::span<const TriggeredRecommendation> recommendations_top() const {
    return std::span(recommendations_all).first(std::min(kTopRecommendations, recommendations_all.size()));
  }
};

AssessmentResult assemble_result(const ValidatedBank& bank, const Selection& selection);

}  // namespace qwatch
