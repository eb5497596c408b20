#pragma once

// Shared test banks. Paths come from the build (QWATCH_SOURCE_DIR).

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qwatch/bank.hpp"
#include "qwatch/chain.hpp"

namespace qwatch::testing {

inline std::string source_path(const std::string& relative) { return std::string(QWATCH_SOURCE_DIR) + "/" + relative; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string mb1_path() { return source_path("tests/fixtures/mb1.json"); }
inline std::string shipped_bank_path() { return source_path("banks/quantum-watch.json"); }

inline QuestionBank mb1_data() { return parse_bank(read_text(mb1_path())); }
inline ValidatedBank mb1() { return ValidatedBank(mb1_data()); }

inline Selection select(std::vector<std::string> answers, std::vector<std::string> sections = {"S1"}) {
  return Selection{std::move(sections), std::move(answers)};
}

/// Compact question builder: answers given as (id, score) pairs.
inline Question make_question(std::string id, ChoiceType type, std::initializer_list<std::pair<const char*, int>> answers,
                              std::vector<std::string> triggers = {}) {
  Question q;
  q.id = std::move(id);
  q.text = "Question " + q.id;
  q.choice_type = type;
  for (const auto& [answer_id, score] : answers) q.answers.push_back({answer_id, std::string("Answer ") + answer_id, score});
  q.help = "Help for " + q.id;
  q.trigger_answer_ids = std::move(triggers);
  return q;
}

inline Section make_section(std::string id, bool mandatory, std::vector<Question> questions) {
  Section s;
  s.id = std::move(id);
  s.name = "Section " + s.id;
  s.description = "Description of " + s.id;
  s.mandatory = mandatory;
  s.time_estimate_minutes = 5;
  s.questions = std::move(questions);
  return s;
}

inline Recommendation make_recommendation(std::string id, std::string question, int importance,
                                          std::vector<std::string> triggers) {
  Recommendation r;
  r.id = std::move(id);
  r.question_id = std::move(question);
  r.text = "Recommendation " + r.id;
  r.importance = importance;
  r.trigger_answer_ids = std::move(triggers);
  return r;
}

/// MB-1 plus Q4 chained on Q3's c2 (Q3 itself chained on Q1's a3).
inline QuestionBank two_link_chain_data() {
  QuestionBank bank = mb1_data();
  bank.sections[0].questions.push_back(
      make_question("Q4", ChoiceType::single, {{"d1", 0}, {"d2", 2}}, {"c2"}));
  return bank;
}

/// Visible pattern [Q1, hidden, hidden, Q4] unless x2 / x3 are selected.
inline QuestionBank multi_skip_data() {
  QuestionBank bank;
  bank.sections.push_back(make_section(
      "S1", true,
      {make_question("Q1", ChoiceType::single, {{"x1", 0}, {"x2", 1}, {"x3", 2}}),
       make_question("Q2", ChoiceType::single, {{"y1", 0}, {"y2", 1}}, {"x2"}),
       make_question("Q3", ChoiceType::single, {{"z1", 0}, {"z2", 1}}, {"x3"}),
       make_question("Q4", ChoiceType::multiple, {{"w1", 1}, {"w2", 1}})}));
  return bank;
}

/// One multiple-choice question whose seven answers each trigger one
/// recommendation with importances 3,3,2,2,1,1,0 (declared shuffled).
inline QuestionBank seven_recommendations_data() {
  QuestionBank bank;
  bank.sections.push_back(make_section(
      "S1", true,
      {make_question("Q1", ChoiceType::multiple,
                     {{"m1", 1}, {"m2", 1}, {"m3", 1}, {"m4", 1}, {"m5", 1}, {"m6", 1}, {"m7", 1}})}));
  bank.recommendations = {
      make_recommendation("R-a", "Q1", 1, {"m1"}), make_recommendation("R-b", "Q1", 3, {"m2"}),
      make_recommendation("R-c", "Q1", 2, {"m3"}), make_recommendation("R-d", "Q1", 0, {"m4"}),
      make_recommendation("R-e", "Q1", 3, {"m5"}), make_recommendation("R-f", "Q1", 1, {"m6"}),
      make_recommendation("R-g", "Q1", 2, {"m7"}),
  };
  return bank;
}

}  // namespace qwatch::testing
