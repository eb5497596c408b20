#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qwatch/bank.hpp"

namespace qwatch {

/// A respondent's chosen sections and answers: the only input to scoring.
/// Both lists behave as sets; answer order is kept for round-tripping.
struct Selection {
  std::vector<std::string> section_ids;
  std::vector<std::string> answer_ids;

  bool operator==(const Selection&) const = default;
};

struct SectionPlan {
  std::string section_id;
  std::vector<std::string> question_ids;

  bool operator==(const SectionPlan&) const = default;
};

/// Visible questions of each selected section, in bank order.
struct VisiblePlan {
  std::vector<SectionPlan> sections;

  std::vector<std::string> flatten() const;
  bool contains(std::string_view question_id) const;

  bool operator==(const VisiblePlan&) const = default;
};

/// Visibility flags for the questions of one section given a set of selected
/// answers. A chained question is visible iff one of its trigger answers is
/// selected and that answer's own question is visible.
std::vector<bool> section_visibility(const ValidatedBank& bank, std::size_t section,
                                     const std::unordered_set<std::string>& answers);

/// Throws UnknownId for ids that do not resolve.
VisiblePlan visible_questions(const ValidatedBank& bank, const Selection& selection);

namespace violation {
inline constexpr std::string_view kSingleChoiceArity = "single-choice-arity";
inline constexpr std::string_view kHiddenQuestionAnswer = "hidden-question-answer";
inline constexpr std::string_view kSectionNotSelected = "section-not-selected";
inline constexpr std::string_view kMandatoryMissing = "mandatory-missing";
inline constexpr std::string_view kNoOptionalSection = "no-optional-section";
inline constexpr std::string_view kUnknownSection = "unknown-section";
inline constexpr std::string_view kUnknownAnswer = "unknown-answer";
}  // namespace violation

struct Violation {
  std::string code;
  std::string subject_id;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Empty result means the selection may be scored. Unknown ids are reported
/// as violations rather than thrown.
std::vector<Violation> check_selection(const ValidatedBank& bank, const Selection& selection);

/// Raised by operations that require a consistent selection.
class InconsistentSelection : public std::runtime_error {
 public:
  explicit InconsistentSelection(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Nearest visible question after `from` in the section, or nullopt at the
/// end of the section. `from == nullopt` starts before the first question.
std::optional<std::size_t> next_question(const ValidatedBank& bank, std::string_view section_id,
                                         std::optional<std::size_t> from, const Selection& selection);

/// Nearest visible question before `from`, or nullopt at the start of the
/// section. `from == nullopt` starts after the last question.
std::optional<std::size_t> prev_question(const ValidatedBank& bank, std::string_view section_id,
                                         std::optional<std::size_t> from, const Selection& selection);

/// Removes answers whose questions are no longer visible (transitively).
/// Used after an edit so stale chained answers never reach scoring.
Selection prune_hidden_answers(const ValidatedBank& bank, Selection selection);

}  // namespace qwatch
