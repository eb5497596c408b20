#include "qwatch/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace qwatch::oracle {

namespace {

struct Slot {
  const Question* question;
  std::string section_id;
};

/// Flattened view of the chosen sections, with visibility computed as a
/// fixpoint over the answer set (no ordering assumption).
class Space {
 public:
  Space(const ValidatedBank& bank, const std::vector<std::string>& section_ids) {
    std::set<std::string> wanted(section_ids.begin(), section_ids.end());
    std::set<std::string> known;
    for (const Section& section : bank.data().sections) known.insert(section.id);
    for (const std::string& id : wanted) {
      if (known.count(id) == 0) throw UnknownId("section", id);
    }
    for (const Section& section : bank.data().sections) {
      if (wanted.count(section.id) == 0) continue;
      section_ids_.push_back(section.id);
      for (const Question& question : section.questions) {
        for (const Answer& answer : question.answers) owner_[answer.id] = slots_.size();
        slots_.push_back({&question, section.id});
      }
    }
    // Answers of unselected sections still need an owner for trigger lookup.
    for (const Section& section : bank.data().sections) {
      for (const Question& question : section.questions) {
        for (const Answer& answer : question.answers) foreign_.insert(answer.id);
      }
    }
  }

  const std::vector<Slot>& slots() const { return slots_; }
  const std::vector<std::string>& section_ids() const { return section_ids_; }
  bool owns(const std::string& answer) const { return owner_.count(answer) != 0; }
  bool exists(const std::string& answer) const { return foreign_.count(answer) != 0; }
  std::size_t owner(const std::string& answer) const { return owner_.at(answer); }

  std::vector<bool> visibility(const std::set<std::string>& chosen) const {
    std::vector<bool> visible(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) visible[i] = slots_[i].question->trigger_answer_ids.empty();
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (visible[i]) continue;
        for (const std::string& trigger : slots_[i].question->trigger_answer_ids) {
          if (chosen.count(trigger) != 0 && owns(trigger) && visible[owner(trigger)]) {
            visible[i] = true;
            changed = true;
            break;
          }
        }
      }
    }
    return visible;
  }

 private:
  std::vector<Slot> slots_;
  std::vector<std::string> section_ids_;
  std::unordered_map<std::string, std::size_t> owner_;
  std::set<std::string> foreign_;
};

struct Stop {};

class Walker {
 public:
  Walker(const Space& space, std::size_t limit, const std::function<void(const Selection&)>& visit)
      : space_(space), limit_(limit), visit_(visit) {}

  EnumerationStats run() {
    try {
      descend(0);
    } catch (const Stop&) {
      stats_.truncated = true;
    }
    return stats_;
  }

 private:
  void descend(std::size_t index) {
    const auto& slots = space_.slots();
    if (index == slots.size()) {
      emit();
      return;
    }
    if (!space_.visibility(chosen_)[index]) {
      descend(index + 1);
      return;
    }
    const auto& answers = slots[index].question->answers;
    if (slots[index].question->choice_type == ChoiceType::single) {
      descend(index + 1);
      for (const Answer& answer : answers) {
        push(answer.id);
        descend(index + 1);
        pop(1);
      }
      return;
    }
    const unsigned long subsets = 1ul << answers.size();
    for (unsigned long mask = 0; mask < subsets; ++mask) {
      std::size_t pushed = 0;
      for (std::size_t a = 0; a < answers.size(); ++a) {
        if ((mask >> a) & 1ul) {
          push(answers[a].id);
          ++pushed;
        }
      }
      descend(index + 1);
      pop(pushed);
    }
  }

  void push(const std::string& id) {
    order_.push_back(id);
    chosen_.insert(id);
  }

  void pop(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      chosen_.erase(order_.back());
      order_.pop_back();
    }
  }

  void emit() {
    if (stats_.emitted == limit_) throw Stop{};
    visit_(Selection{space_.section_ids(), order_});
    ++stats_.emitted;
  }

  const Space& space_;
  std::size_t limit_;
  std::function<void(const Selection&)> visit_;
  std::set<std::string> chosen_;
  std::vector<std::string> order_;
  EnumerationStats stats_;
};

struct Evaluation {
  double risk = 0.0;
  std::vector<bool> visible;
  std::set<std::string> chosen;
};

Evaluation evaluate(const Space& space, const Selection& selection) {
  Evaluation out;
  out.chosen = std::set<std::string>(selection.answer_ids.begin(), selection.answer_ids.end());
  std::vector<Violation> problems;
  for (const std::string& id : out.chosen) {
    if (!space.exists(id)) {
      problems.push_back({std::string(violation::kUnknownAnswer), id, "unknown answer"});
    } else if (!space.owns(id)) {
      problems.push_back({std::string(violation::kSectionNotSelected), id, "answer outside selected sections"});
    }
  }
  out.visible = space.visibility(out.chosen);

  long selected = 0;
  long total = 0;
  const auto& slots = space.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Question& question = *slots[i].question;
    int picked = 0;
    int picked_sum = 0;
    for (const Answer& answer : question.answers) {
      if (out.chosen.count(answer.id) != 0) {
        ++picked;
        picked_sum += answer.risk_score;
      }
    }
    if (!out.visible[i]) {
      if (picked > 0) problems.push_back({std::string(violation::kHiddenQuestionAnswer), question.id, "hidden"});
      continue;
    }
    if (question.choice_type == ChoiceType::single) {
      if (picked > 1) problems.push_back({std::string(violation::kSingleChoiceArity), question.id, "arity"});
      int highest = 0;
      for (const Answer& answer : question.answers) highest = std::max(highest, answer.risk_score);
      total += highest;
    } else {
      for (const Answer& answer : question.answers) total += answer.risk_score;
    }
    selected += picked_sum;
  }
  if (!problems.empty()) throw InconsistentSelection(std::move(problems));
  out.risk = total == 0 ? 0.0 : 100.0 * static_cast<double>(selected) / static_cast<double>(total);
  return out;
}

}  // namespace

EnumerationStats enumerate_assignments(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                                       std::size_t limit, const std::function<void(const Selection&)>& visit) {
  if (limit == 0) throw std::invalid_argument("enumeration limit must be positive");
  const Space space(bank, section_ids);
  return Walker(space, limit, visit).run();
}

Enumeration enumerate_assignments(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                                  std::size_t limit) {
  Enumeration out;
  out.truncated = enumerate_assignments(bank, section_ids, limit, [&](const Selection& selection) {
                    out.selections.push_back(selection);
                  }).truncated;
  return out;
}

double oracle_score(const ValidatedBank& bank, const Selection& selection) {
  return evaluate(Space(bank, selection.section_ids), selection).risk;
}

AnswerSpaceReport report(const ValidatedBank& bank, const std::vector<std::string>& section_ids,
                         std::size_t limit) {
  if (limit == 0) throw std::invalid_argument("enumeration limit must be positive");
  const Space space(bank, section_ids);
  AnswerSpaceReport out;
  out.category_counts = {{RiskCategory::low, 0}, {RiskCategory::medium, 0}, {RiskCategory::high, 0}};

  // Recommendations whose question lies in the explored sections, paired
  // with that question's slot.
  const auto& slots = space.slots();
  std::vector<std::pair<const Recommendation*, std::size_t>> watched;
  for (const Recommendation& rec : bank.data().recommendations) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].question->id == rec.question_id) {
        watched.emplace_back(&rec, i);
        out.per_recommendation_trigger_counts[rec.id] = 0;
      }
    }
  }

  const auto stats = Walker(space, limit, [&](const Selection& selection) {
                       const Evaluation eval = evaluate(space, selection);
                       if (out.assignments_enumerated == 0) {
                         out.min_risk = out.max_risk = eval.risk;
                       } else {
                         out.min_risk = std::min(out.min_risk, eval.risk);
                         out.max_risk = std::max(out.max_risk, eval.risk);
                       }
                       ++out.assignments_enumerated;
                       ++out.category_counts[categorize(eval.risk)];
                       for (const auto& [rec, slot] : watched) {
                         if (!eval.visible[slot]) continue;
                         const bool fired =
                             std::any_of(rec->trigger_answer_ids.begin(), rec->trigger_answer_ids.end(),
                                         [&](const std::string& id) { return eval.chosen.count(id) != 0; });
                         if (fired) ++out.per_recommendation_trigger_counts[rec->id];
                       }
                     }).run();
  out.truncated = stats.truncated;
  return out;
}

}  // namespace qwatch::oracle
