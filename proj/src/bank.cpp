#include "qwatch/bank.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace qwatch {

using nlohmann::json;

std::string_view to_string(ChoiceType type) {
  return type == ChoiceType::single ? "single" : "multiple";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::error ? "error" : "warning";
}

std::size_t BankDiagnostics::error_count() const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::error;
  }));
}

std::size_t BankDiagnostics::warning_count() const {
  return findings.size() - error_count();
}

BankParseError::BankParseError(std::string location, const std::string& message)
    : std::runtime_error(location.empty() ? message : location + ": " + message),
      location_(std::move(location)) {}

BankRejected::BankRejected(BankDiagnostics diagnostics)
    : std::runtime_error("question bank has " + std::to_string(diagnostics.error_count()) +
                         " validation error(s)"),
      diagnostics_(std::move(diagnostics)) {}

UnknownId::UnknownId(std::string_view kind, std::string id)
    : std::out_of_range("unknown " + std::string(kind) + " id '" + id + "'"), id_(std::move(id)) {}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0u) != 0x80u;
  }));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

/// Walks one JSON object, tracking its pointer for error messages and
/// rejecting keys outside the allowed set.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string pointer, std::string owner = {})
      : node_(node), pointer_(std::move(pointer)), owner_(std::move(owner)) {
    if (!node_.is_object()) fail(pointer_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& item : node_.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
        fail(child(item.key()), "unknown field '" + item.key() + "'");
      }
    }
  }

  void set_owner(std::string owner) { owner_ = std::move(owner); }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& require(const std::string& key) const {
    auto it = node_.find(key);
    if (it == node_.end()) fail(pointer_, "missing required field '" + key + "'");
    return *it;
  }

  std::string string(const std::string& key) const {
    const json& value = require(key);
    if (!value.is_string()) fail(child(key), "field '" + key + "' must be a string");
    return value.get<std::string>();
  }

  std::optional<std::string> optional_string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return string(key);
  }

  int integer(const std::string& key) const {
    const json& value = require(key);
    if (!value.is_number_integer()) fail(child(key), "field '" + key + "' must be an integer");
    return value.get<int>();
  }

  bool boolean(const std::string& key) const {
    const json& value = require(key);
    if (!value.is_boolean()) fail(child(key), "field '" + key + "' must be a boolean");
    return value.get<bool>();
  }

  const json& array(const std::string& key) const {
    const json& value = require(key);
    if (!value.is_array()) fail(child(key), "field '" + key + "' must be an array");
    return value;
  }

  std::vector<std::string> string_array(const std::string& key) const {
    std::vector<std::string> out;
    const json& values = array(key);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_string()) {
        fail(child(key) + "/" + std::to_string(i), "expected a string");
      }
      out.push_back(values[i].get<std::string>());
    }
    return out;
  }

  std::string child(const std::string& key) const { return pointer_ + "/" + key; }
  std::string element(const std::string& key, std::size_t index) const {
    return child(key) + "/" + std::to_string(index);
  }

  [[noreturn]] void fail(const std::string& where, const std::string& message) const {
    throw BankParseError(where, owner_.empty() ? message : owner_ + ": " + message);
  }

 private:
  const json& node_;
  std::string pointer_;
  std::string owner_;
};

/// Names the object by its id (when it has a string one) in later errors.
std::string owner_label(const json& node, std::string_view kind) {
  if (node.is_object()) {
    auto it = node.find("id");
    if (it != node.end() && it->is_string()) {
      return std::string(kind) + " '" + it->get<std::string>() + "'";
    }
  }
  return {};
}

ChoiceType parse_choice_type(const ObjectReader& reader) {
  const std::string value = reader.string("choice_type");
  if (value == "single") return ChoiceType::single;
  if (value == "multiple") return ChoiceType::multiple;
  reader.fail(reader.child("choice_type"), "choice_type must be \"single\" or \"multiple\", got \"" + value + "\"");
}

Answer parse_answer(const json& node, const std::string& pointer) {
  ObjectReader reader(node, pointer, owner_label(node, "answer"));
  reader.allow_only({"id", "text", "risk_score"});
  return Answer{reader.string("id"), reader.string("text"), reader.integer("risk_score")};
}

Question parse_question(const json& node, const std::string& pointer) {
  ObjectReader reader(node, pointer, owner_label(node, "question"));
  reader.allow_only({"id", "text", "choice_type", "answers", "help", "trigger_answer_ids"});
  Question question;
  question.id = reader.string("id");
  question.text = reader.string("text");
  question.choice_type = parse_choice_type(reader);
  const json& answers = reader.array("answers");
  for (std::size_t i = 0; i < answers.size(); ++i) {
    question.answers.push_back(parse_answer(answers[i], reader.element("answers", i)));
  }
  question.help = reader.optional_string("help");
  if (reader.has("trigger_answer_ids")) {
    question.trigger_answer_ids = reader.string_array("trigger_answer_ids");
  }
  return question;
}

Section parse_section(const json& node, const std::string& pointer) {
  ObjectReader reader(node, pointer, owner_label(node, "section"));
  reader.allow_only({"id", "name", "description", "mandatory", "time_estimate_minutes", "questions"});
  Section section;
  section.id = reader.string("id");
  section.name = reader.string("name");
  section.description = reader.string("description");
  section.mandatory = reader.boolean("mandatory");
  section.time_estimate_minutes = reader.integer("time_estimate_minutes");
  const json& questions = reader.array("questions");
  for (std::size_t i = 0; i < questions.size(); ++i) {
    section.questions.push_back(parse_question(questions[i], reader.element("questions", i)));
  }
  return section;
}

Recommendation parse_recommendation(const json& node, const std::string& pointer) {
  ObjectReader reader(node, pointer, owner_label(node, "recommendation"));
  reader.allow_only({"id", "question_id", "text", "importance", "trigger_answer_ids", "resource_link"});
  Recommendation rec;
  rec.id = reader.string("id");
  rec.question_id = reader.string("question_id");
  rec.text = reader.string("text");
  rec.importance = reader.integer("importance");
  rec.trigger_answer_ids = reader.string_array("trigger_answer_ids");
  rec.resource_link = reader.optional_string("resource_link");
  return rec;
}

QuestionBank parse_document(const json& doc) {
  ObjectReader reader(doc, "");
  reader.allow_only({"format_version", "comment", "sections", "recommendations"});
  QuestionBank bank;
  bank.format_version = reader.string("format_version");
  if (bank.format_version != kFormatVersion) {
    reader.fail("/format_version", "unsupported format_version \"" + bank.format_version + "\"");
  }
  bank.comment = reader.optional_string("comment");
  const json& sections = reader.array("sections");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    bank.sections.push_back(parse_section(sections[i], reader.element("sections", i)));
  }
  const json& recs = reader.array("recommendations");
  for (std::size_t i = 0; i < recs.size(); ++i) {
    bank.recommendations.push_back(parse_recommendation(recs[i], reader.element("recommendations", i)));
  }
  return bank;
}

}  // namespace

QuestionBank parse_bank(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw BankParseError("byte " + std::to_string(e.byte), "malformed JSON document");
  }
  return parse_document(doc);
}

QuestionBank parse_bank(std::istream& source) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return parse_bank(text);
}

std::string serialize_bank(const QuestionBank& bank) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["format_version"] = bank.format_version;
  if (bank.comment) doc["comment"] = *bank.comment;
  doc["sections"] = ojson::array();
  for (const Section& section : bank.sections) {
    ojson s;
    s["id"] = section.id;
    s["name"] = section.name;
    s["description"] = section.description;
    s["mandatory"] = section.mandatory;
    s["time_estimate_minutes"] = section.time_estimate_minutes;
    s["questions"] = ojson::array();
    for (const Question& question : section.questions) {
      ojson q;
      q["id"] = question.id;
      q["text"] = question.text;
      q["choice_type"] = to_string(question.choice_type);
      q["answers"] = ojson::array();
      for (const Answer& answer : question.answers) {
        q["answers"].push_back({{"id", answer.id}, {"text", answer.text}, {"risk_score", answer.risk_score}});
      }
      if (question.help) q["help"] = *question.help;
      if (question.chained()) q["trigger_answer_ids"] = question.trigger_answer_ids;
      s["questions"].push_back(std::move(q));
    }
    doc["sections"].push_back(std::move(s));
  }
  doc["recommendations"] = ojson::array();
  for (const Recommendation& rec : bank.recommendations) {
    ojson r;
    r["id"] = rec.id;
    r["question_id"] = rec.question_id;
    r["text"] = rec.text;
    r["importance"] = rec.importance;
    r["trigger_answer_ids"] = rec.trigger_answer_ids;
    if (rec.resource_link) r["resource_link"] = *rec.resource_link;
    doc["recommendations"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct Located {
  std::size_t section;
  std::size_t question;
};

class Validator {
 public:
  explicit Validator(const QuestionBank& bank) : bank_(bank) {}

  BankDiagnostics run() {
    index_answers();
    check_ids();
    check_sections();
    check_recommendations();
    check_reachability();
    return std::move(out_);
  }

 private:
  void error(std::string code, std::string subject, std::string message) {
    out_.findings.push_back({Severity::error, std::move(code), std::move(message), std::move(subject)});
  }
  void warning(std::string code, std::string subject, std::string message) {
    out_.findings.push_back({Severity::warning, std::move(code), std::move(message), std::move(subject)});
  }

  void check_text(const std::string& subject, std::string_view field, const std::string& text) {
    const std::size_t length = utf8_length(text);
    if (length > kMaxTextLength) {
      error("text-too-long", subject,
            std::string(field) + " has " + std::to_string(length) + " characters (limit " +
                std::to_string(kMaxTextLength) + ")");
    }
  }

  // First occurrence wins; duplicates are reported by check_ids.
  void index_answers() {
    for (std::size_t s = 0; s < bank_.sections.size(); ++s) {
      const auto& questions = bank_.sections[s].questions;
      for (std::size_t q = 0; q < questions.size(); ++q) {
        question_at_.try_emplace(questions[q].id, Located{s, q});
        for (const Answer& answer : questions[q].answers) {
          answer_at_.try_emplace(answer.id, Located{s, q});
        }
      }
    }
  }

  void check_ids() {
    std::set<std::string> seen;
    auto visit = [&](const std::string& id, std::string_view kind) {
      if (id.empty()) {
        error("empty-id", id, std::string(kind) + " has an empty id");
        return;
      }
      if (!seen.insert(id).second) {
        error("duplicate-id", id, std::string(kind) + " id '" + id + "' is already used");
      }
    };
    for (const Section& section : bank_.sections) {
      visit(section.id, "section");
      for (const Question& question : section.questions) {
        visit(question.id, "question");
        for (const Answer& answer : question.answers) visit(answer.id, "answer");
      }
    }
    for (const Recommendation& rec : bank_.recommendations) visit(rec.id, "recommendation");
  }

  void check_sections() {
    std::vector<std::string> mandatory;
    for (std::size_t s = 0; s < bank_.sections.size(); ++s) {
      const Section& section = bank_.sections[s];
      if (section.mandatory) mandatory.push_back(section.id);
      check_text(section.id, "name", section.name);
      check_text(section.id, "description", section.description);
      if (section.time_estimate_minutes < 1) {
        error("time-estimate-range", section.id,
              "time_estimate_minutes must be positive, got " + std::to_string(section.time_estimate_minutes));
      }
      if (section.questions.empty()) {
        error("empty-section", section.id, "section has no questions");
      }
      for (std::size_t q = 0; q < section.questions.size(); ++q) {
        check_question(s, q);
      }
    }
    if (mandatory.size() != 1) {
      error("mandatory-count", mandatory.size() > 1 ? mandatory[1] : std::string("bank"),
            "exactly one section must be mandatory, found " + std::to_string(mandatory.size()));
    }
  }

  void check_question(std::size_t s, std::size_t q) {
    const Question& question = bank_.sections[s].questions[q];
    check_text(question.id, "text", question.text);
    if (question.answers.size() < 2) {
      error("too-few-answers", question.id,
            "question needs at least 2 answers, has " + std::to_string(question.answers.size()));
    }
    for (const Answer& answer : question.answers) {
      check_text(answer.id, "answer text", answer.text);
      if (answer.risk_score < kMinRisk || answer.risk_score > kMaxRisk) {
        error("risk-range", answer.id,
              "risk_score " + std::to_string(answer.risk_score) + " outside [0, 3]");
      }
    }
    if (question.help) {
      check_text(question.id, "help", *question.help);
    } else {
      warning("missing-help", question.id, "question has no help text");
    }
    for (const std::string& trigger : question.trigger_answer_ids) {
      auto it = answer_at_.find(trigger);
      if (it == answer_at_.end()) {
        error("unknown-trigger", question.id, "trigger answer '" + trigger + "' does not exist");
      } else if (it->second.section != s) {
        error("cross-section-trigger", question.id,
              "trigger answer '" + trigger + "' belongs to another section");
      } else if (it->second.question >= q) {
        error("forward-trigger", question.id,
              "trigger answer '" + trigger + "' does not belong to an earlier question");
      }
    }
  }

  void check_recommendations() {
    for (const Recommendation& rec : bank_.recommendations) {
      check_text(rec.id, "text", rec.text);
      if (rec.importance < kMinRisk || rec.importance > kMaxRisk) {
        error("importance-range", rec.id,
              "importance " + std::to_string(rec.importance) + " outside [0, 3]");
      }
      auto question = question_at_.find(rec.question_id);
      if (question == question_at_.end()) {
        error("unknown-question", rec.id, "question '" + rec.question_id + "' does not exist");
      }
      if (rec.trigger_answer_ids.empty()) {
        error("empty-triggers", rec.id, "recommendation has no trigger answers");
      }
      for (const std::string& trigger : rec.trigger_answer_ids) {
        auto it = answer_at_.find(trigger);
        if (it == answer_at_.end()) {
          error("unknown-trigger", rec.id, "trigger answer '" + trigger + "' does not exist");
        } else if (question != question_at_.end() &&
                   (it->second.section != question->second.section ||
                    it->second.question != question->second.question)) {
          error("foreign-trigger", rec.id,
                "trigger answer '" + trigger + "' is not an answer of question '" + rec.question_id + "'");
        }
      }
    }
  }

  // A chained question is reachable iff some trigger belongs to a reachable
  // earlier question of its own section. Only well-placed triggers count.
  void check_reachability() {
    std::set<std::pair<std::size_t, std::size_t>> reachable;
    for (std::size_t s = 0; s < bank_.sections.size(); ++s) {
      const auto& questions = bank_.sections[s].questions;
      for (std::size_t q = 0; q < questions.size(); ++q) {
        const Question& question = questions[q];
        bool ok = !question.chained();
        for (const std::string& trigger : question.trigger_answer_ids) {
          auto it = answer_at_.find(trigger);
          if (it != answer_at_.end() && it->second.section == s && it->second.question < q &&
              reachable.count({s, it->second.question}) != 0) {
            ok = true;
          }
        }
        if (ok) {
          reachable.insert({s, q});
        } else {
          warning("unreachable-question", question.id, "no trigger answer of this chained question can be selected");
        }
      }
    }
    for (const Recommendation& rec : bank_.recommendations) {
      auto question = question_at_.find(rec.question_id);
      bool live = false;
      if (question != question_at_.end() &&
          reachable.count({question->second.section, question->second.question}) != 0) {
        for (const std::string& trigger : rec.trigger_answer_ids) {
          auto it = answer_at_.find(trigger);
          if (it != answer_at_.end() && it->second.section == question->second.section &&
              it->second.question == question->second.question) {
            live = true;
          }
        }
      }
      if (!live) {
        warning("dead-recommendation", rec.id, "recommendation can never be triggered");
      }
    }
  }

  const QuestionBank& bank_;
  BankDiagnostics out_;
  std::unordered_map<std::string, Located> question_at_;
  std::unordered_map<std::string, Located> answer_at_;
};

}  // namespace

BankDiagnostics validate_bank(const QuestionBank& bank) { return Validator(bank).run(); }

// ---------------------------------------------------------------------------
// ValidatedBank

ValidatedBank::ValidatedBank(QuestionBank bank) : bank_(std::move(bank)), diagnostics_(validate_bank(bank_)) {
  if (!diagnostics_.usable()) throw BankRejected(diagnostics_);
  for (std::size_t s = 0; s < bank_.sections.size(); ++s) {
    const Section& section = bank_.sections[s];
    if (section.mandatory) mandatory_ = s;
    sections_.emplace(section.id, s);
    for (std::size_t q = 0; q < section.questions.size(); ++q) {
      const Question& question = section.questions[q];
      questions_.emplace(question.id, QuestionRef{s, q});
      for (std::size_t a = 0; a < question.answers.size(); ++a) {
        answers_.emplace(question.answers[a].id, AnswerRef{s, q, a});
      }
    }
  }
}

std::optional<std::size_t> ValidatedBank::find_section(std::string_view id) const {
  auto it = sections_.find(std::string(id));
  if (it == sections_.end()) return std::nullopt;
  return it->second;
}

std::optional<QuestionRef> ValidatedBank::find_question(std::string_view id) const {
  auto it = questions_.find(std::string(id));
  if (it == questions_.end()) return std::nullopt;
  return it->second;
}

std::optional<AnswerRef> ValidatedBank::find_answer(std::string_view id) const {
  auto it = answers_.find(std::string(id));
  if (it == answers_.end()) return std::nullopt;
  return it->second;
}

std::size_t ValidatedBank::section_index(std::string_view id) const {
  if (auto found = find_section(id)) return *found;
  throw UnknownId("section", std::string(id));
}

QuestionRef ValidatedBank::question_ref(std::string_view id) const {
  if (auto found = find_question(id)) return *found;
  throw UnknownId("question", std::string(id));
}

AnswerRef ValidatedBank::answer_ref(std::string_view id) const {
  if (auto found = find_answer(id)) return *found;
  throw UnknownId("answer", std::string(id));
}

ValidatedBank load_bank(std::string_view source) { return ValidatedBank(parse_bank(source)); }

ValidatedBank load_bank_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BankIoError("cannot read bank file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw BankIoError("error while reading bank file '" + path + "'");
  return load_bank(buffer.str());
}

}  // namespace qwatch
