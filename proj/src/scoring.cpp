#include "qwatch/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace qwatch {

std::string_view to_string(RiskCategory category) {
  switch (category) {
    case RiskCategory::low:
      return "low";
    case RiskCategory::medium:
      return "medium";
    case RiskCategory::high:
      return "high";
  }
  return "low";
}

int question_cap(const Question& question) {
  if (question.answers.empty()) return 0;
  if (question.choice_type == ChoiceType::single) {
    return std::max_element(question.answers.begin(), question.answers.end(),
                            [](const Answer& a, const Answer& b) { return a.risk_score < b.risk_score; })
        ->risk_score;
  }
  return std::accumulate(question.answers.begin(), question.answers.end(), 0,
                         [](int sum, const Answer& a) { return sum + a.risk_score; });
}

namespace {

void require_consistent(const ValidatedBank& bank, const Selection& selection) {
  auto violations = check_selection(bank, selection);
  if (!violations.empty()) throw InconsistentSelection(std::move(violations));
}

}  // namespace

ScoreBreakdown compute_breakdown(const ValidatedBank& bank, const Selection& selection) {
  require_consistent(bank, selection);
  const std::unordered_set<std::string> answers(selection.answer_ids.begin(), selection.answer_ids.end());

  ScoreBreakdown out;
  for (const SectionPlan& section : visible_questions(bank, selection).sections) {
    for (const std::string& id : section.question_ids) {
      const Question& question = bank.question(bank.question_ref(id));
      QuestionContribution entry{question.id, 0, question_cap(question)};
      for (const Answer& answer : question.answers) {
        if (answers.count(answer.id) != 0) entry.contribution += answer.risk_score;
      }
      out.numerator += entry.contribution;
      out.denominator += entry.cap;
      out.per_question.push_back(std::move(entry));
    }
  }
  out.risk_percent = out.denominator == 0
                         ? 0.0
                         : 100.0 * static_cast<double>(out.numerator) / static_cast<double>(out.denominator);
  return out;
}

RiskCategory categorize(double risk_percent) {
  if (!(risk_percent >= 0.0 && risk_percent <= 100.0)) {
    throw std::domain_error("risk percentage " + std::to_string(risk_percent) + " outside [0, 100]");
  }
  const double rounded = std::round(risk_percent);
  if (rounded <= 33.0) return RiskCategory::low;
  if (rounded <= 59.0) return RiskCategory::medium;
  return RiskCategory::high;
}

std::string_view category_explanation(RiskCategory category) {
  switch (category) {
    case RiskCategory::low:
      return "Your answers indicate a low exposure to quantum threats. Most of the practices you "
             "reported are already considered safe, but keep reviewing your cryptography as post-quantum "
             "standards are adopted and apply any recommendations listed below.";
    case RiskCategory::medium:
      return "Your answers indicate a medium exposure to quantum threats. Some systems rely on "
             "cryptography or practices that a future quantum computer could break, and data captured "
             "today could be decrypted later. Start planning the recommended changes, beginning with the "
             "most important ones.";
    case RiskCategory::high:
      return "Your answers indicate a high exposure to quantum threats. Several systems depend on "
             "cryptography or practices that are vulnerable to quantum attacks, including "
             "store-now-decrypt-later capture of your traffic. Act on the recommendations below as a "
             "priority and prepare a migration plan to post-quantum algorithms.";
  }
  return {};
}

std::vector<TriggeredRecommendation> triggered_recommendations(const ValidatedBank& bank,
                                                               const Selection& selection) {
  require_consistent(bank, selection);
  const VisiblePlan plan = visible_questions(bank, selection);
  const std::unordered_set<std::string> answers(selection.answer_ids.begin(), selection.answer_ids.end());

  std::vector<TriggeredRecommendation> out;
  for (const Recommendation& rec : bank.recommendations()) {
    if (!plan.contains(rec.question_id)) continue;
    const bool fired = std::any_of(rec.trigger_answer_ids.begin(), rec.trigger_answer_ids.end(),
                                   [&](const std::string& id) { return answers.count(id) != 0; });
    if (fired) out.push_back({rec.id, rec.question_id, rec.text, rec.importance, rec.resource_link});
  }
  std::stable_sort(out.begin(), out.end(), [](const TriggeredRecommendation& a, const TriggeredRecommendation& b) {
    return a.importance > b.importance;
  });
  return out;
}

AssessmentResult assemble_result(const ValidatedBank& bank, const Selection& selection) {
  AssessmentResult result;
  result.breakdown = compute_breakdown(bank, selection);
  result.risk_category = categorize(result.breakdown.risk_percent);
  result.category_explanation = std::string(category_explanation(result.risk_category));
  result.recommendations_all = triggered_recommendations(bank, selection);
  return result;
}

}  // namespace qwatch
