#include "qwatch/chain.hpp"

#include <algorithm>
#include <stdexcept>

namespace qwatch {

std::vector<std::string> VisiblePlan::flatten() const {
  std::vector<std::string> out;
  for (const SectionPlan& section : sections) {
    out.insert(out.end(), section.question_ids.begin(), section.question_ids.end());
  }
  return out;
}

bool VisiblePlan::contains(std::string_view question_id) const {
  return std::any_of(sections.begin(), sections.end(), [&](const SectionPlan& section) {
    return std::find(section.question_ids.begin(), section.question_ids.end(), question_id) !=
           section.question_ids.end();
  });
}

InconsistentSelection::InconsistentSelection(std::vector<Violation> violations)
    : std::runtime_error("selection is inconsistent (" + std::to_string(violations.size()) + " violation(s))"),
      violations_(std::move(violations)) {}

std::vector<bool> section_visibility(const ValidatedBank& bank, std::size_t section,
                                     const std::unordered_set<std::string>& answers) {
  const auto& questions = bank.section(section).questions;
  std::vector<bool> visible(questions.size(), false);
  // Triggers always point at earlier questions, so one forward pass settles it.
  for (std::size_t q = 0; q < questions.size(); ++q) {
    const Question& question = questions[q];
    if (!question.chained()) {
      visible[q] = true;
      continue;
    }
    for (const std::string& trigger : question.trigger_answer_ids) {
      if (answers.count(trigger) != 0 && visible[bank.answer_ref(trigger).question]) {
        visible[q] = true;
        break;
      }
    }
  }
  return visible;
}

namespace {

std::unordered_set<std::string> answer_set(const Selection& selection) {
  return {selection.answer_ids.begin(), selection.answer_ids.end()};
}

std::vector<bool> selected_sections(const ValidatedBank& bank, const Selection& selection) {
  std::vector<bool> chosen(bank.sections().size(), false);
  for (const std::string& id : selection.section_ids) chosen[bank.section_index(id)] = true;
  return chosen;
}

}  // namespace

VisiblePlan visible_questions(const ValidatedBank& bank, const Selection& selection) {
  const std::vector<bool> chosen = selected_sections(bank, selection);
  for (const std::string& id : selection.answer_ids) bank.answer_ref(id);
  const auto answers = answer_set(selection);

  VisiblePlan plan;
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    if (!chosen[s]) continue;
    const Section& section = bank.section(s);
    const std::vector<bool> visible = section_visibility(bank, s, answers);
    SectionPlan entry{section.id, {}};
    for (std::size_t q = 0; q < visible.size(); ++q) {
      if (visible[q]) entry.question_ids.push_back(section.questions[q].id);
    }
    plan.sections.push_back(std::move(entry));
  }
  return plan;
}

std::vector<Violation> check_selection(const ValidatedBank& bank, const Selection& selection) {
  std::vector<Violation> out;
  std::vector<bool> chosen(bank.sections().size(), false);

  for (const std::string& id : selection.section_ids) {
    if (auto s = bank.find_section(id)) {
      chosen[*s] = true;
    } else {
      out.push_back({std::string(violation::kUnknownSection), id, "unknown section id '" + id + "'"});
    }
  }

  const Section& mandatory = bank.section(bank.mandatory_section());
  if (!chosen[bank.mandatory_section()]) {
    out.push_back({std::string(violation::kMandatoryMissing), mandatory.id,
                   "mandatory section '" + mandatory.id + "' is not selected"});
  }
  const bool has_optional = bank.sections().size() > 1;
  bool any_optional = false;
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    if (chosen[s] && s != bank.mandatory_section()) any_optional = true;
  }
  if (has_optional && !any_optional) {
    out.push_back({std::string(violation::kNoOptionalSection), "section_ids",
                   "at least one non-mandatory section must be selected"});
  }

  // Answers that resolve and sit in a selected section take part in the
  // per-question checks below.
  std::unordered_set<std::string> in_scope;
  std::unordered_set<std::string> seen;
  for (const std::string& id : selection.answer_ids) {
    if (!seen.insert(id).second) continue;
    auto ref = bank.find_answer(id);
    if (!ref) {
      out.push_back({std::string(violation::kUnknownAnswer), id, "unknown answer id '" + id + "'"});
      continue;
    }
    if (!chosen[ref->section]) {
      const Question& question = bank.question({ref->section, ref->question});
      out.push_back({std::string(violation::kSectionNotSelected), question.id,
                     "answer '" + id + "' belongs to section '" + bank.section(ref->section).id +
                         "' which is not selected"});
      continue;
    }
    in_scope.insert(id);
  }

  for (std::size_t s = 0; s < chosen.size(); ++s) {
    if (!chosen[s]) continue;
    const Section& section = bank.section(s);
    const std::vector<bool> visible = section_visibility(bank, s, in_scope);
    for (std::size_t q = 0; q < section.questions.size(); ++q) {
      const Question& question = section.questions[q];
      std::vector<std::string> picked;
      for (const Answer& answer : question.answers) {
        if (in_scope.count(answer.id) != 0) picked.push_back(answer.id);
      }
      if (picked.empty()) continue;
      if (!visible[q]) {
        out.push_back({std::string(violation::kHiddenQuestionAnswer), question.id,
                       "answer '" + picked.front() + "' belongs to question '" + question.id +
                           "' which is hidden by the current selection"});
      }
      if (question.choice_type == ChoiceType::single && picked.size() > 1) {
        out.push_back({std::string(violation::kSingleChoiceArity), question.id,
                       "single-choice question '" + question.id + "' has " + std::to_string(picked.size()) +
                           " answers selected"});
      }
    }
  }
  return out;
}

namespace {

std::vector<bool> navigation_mask(const ValidatedBank& bank, std::string_view section_id,
                                  std::optional<std::size_t> from, const Selection& selection) {
  const std::size_t s = bank.section_index(section_id);
  const std::size_t count = bank.section(s).questions.size();
  if (from && *from >= count) {
    throw std::out_of_range("question index " + std::to_string(*from) + " out of range for section '" +
                            std::string(section_id) + "'");
  }
  return section_visibility(bank, s, answer_set(selection));
}

}  // namespace

std::optional<std::size_t> next_question(const ValidatedBank& bank, std::string_view section_id,
                                         std::optional<std::size_t> from, const Selection& selection) {
  const std::vector<bool> visible = navigation_mask(bank, section_id, from, selection);
  for (std::size_t q = from ? *from + 1 : 0; q < visible.size(); ++q) {
    if (visible[q]) return q;
  }
  return std::nullopt;
}

std::optional<std::size_t> prev_question(const ValidatedBank& bank, std::string_view section_id,
                                         std::optional<std::size_t> from, const Selection& selection) {
  const std::vector<bool> visible = navigation_mask(bank, section_id, from, selection);
  for (std::size_t q = from ? *from : visible.size(); q-- > 0;) {
    if (visible[q]) return q;
  }
  return std::nullopt;
}

Selection prune_hidden_answers(const ValidatedBank& bank, Selection selection) {
  auto answers = answer_set(selection);
  std::unordered_set<std::string> keep;
  for (std::size_t s = 0; s < bank.sections().size(); ++s) {
    const Section& section = bank.section(s);
    const std::vector<bool> visible = section_visibility(bank, s, answers);
    for (std::size_t q = 0; q < section.questions.size(); ++q) {
      if (!visible[q]) continue;
      for (const Answer& answer : section.questions[q].answers) {
        if (answers.count(answer.id) != 0) keep.insert(answer.id);
      }
    }
  }
  std::erase_if(selection.answer_ids, [&](const std::string& id) { return keep.count(id) == 0; });
  return selection;
}

}  // namespace qwatch
