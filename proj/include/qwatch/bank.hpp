#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qwatch {

inline constexpr int kMinRisk = 0;
inline constexpr int kMaxRisk = 3;
inline constexpr std::size_t kMaxTextLength = 1000;  // code points
inline constexpr std::string_view kFormatVersion = "1";

enum class ChoiceType { single, multiple };

std::string_view to_string(ChoiceType type);

struct Answer {
  std::string id;
  std::string text;
  int risk_score = 0;

  bool operator==(const Answer&) const = default;
};

struct Question {
  std::string id;
  std::string text;
  ChoiceType choice_type = ChoiceType::single;
  std::vector<Answer> answers;
  std::optional<std::string> help;
  std::vector<std::string> trigger_answer_ids;

  /// Shown only when one of its trigger answers is selected.
  bool chained() const { return !trigger_answer_ids.empty(); }

  bool operator==(const Question&) const = default;
};

struct Section {
  std::string id;
  std::string name;
  std::string description;
  bool mandatory = false;
  int time_estimate_minutes = 1;
  std::vector<Question> questions;

  bool operator==(const Section&) const = default;
};

struct Recommendation {
  std::string id;
  std::string question_id;
  std::string text;
  int importance = 0;
  std::vector<std::string> trigger_answer_ids;
  std::optional<std::string> resource_link;

  bool operator==(const Recommendation&) const = default;
};

/// Plain parse result. Nothing beyond document shape is guaranteed until it
/// has gone through validate_bank (or load_bank).
struct QuestionBank {
  std::string format_version{kFormatVersion};
  std::optional<std::string> comment;
  std::vector<Section> sections;
  std::vector<Recommendation> recommendations;

  bool operator==(const QuestionBank&) const = default;
};

enum class Severity { error, warning };

std::string_view to_string(Severity severity);

struct Finding {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  std::string subject_id;

  bool operator==(const Finding&) const = default;
};

struct BankDiagnostics {
  std::vector<Finding> findings;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool usable() const { return error_count() == 0; }
};

/// Malformed bank document. `location` is a JSON pointer into the document
/// (or a byte offset for syntax errors).
class BankParseError : public std::runtime_error {
 public:
  BankParseError(std::string location, const std::string& message);
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

QuestionBank parse_bank(std::istream& source);
QuestionBank parse_bank(std::string_view source);

/// Strict-mode inverse of parse_bank.
std::string serialize_bank(const QuestionBank& bank);

BankDiagnostics validate_bank(const QuestionBank& bank);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

struct AnswerRef {
  std::size_t section = 0;
  std::size_t question = 0;
  std::size_t answer = 0;
};

struct QuestionRef {
  std::size_t section = 0;
  std::size_t question = 0;
};

class ValidatedBank;

/// Thrown when a bank with error findings is offered to the engine.
class BankRejected : public std::runtime_error {
 public:
  explicit BankRejected(BankDiagnostics diagnostics);
  const BankDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  BankDiagnostics diagnostics_;
};

/// The bank file could not be read.
class BankIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lookup for an id that does not exist in the bank.
class UnknownId : public std::out_of_range {
 public:
  UnknownId(std::string_view kind, std::string id);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// An immutable bank that passed validation, with id lookup tables.
/// The only bank type the engine modules accept.
class ValidatedBank {
 public:
  /// Throws BankRejected if validation reports any error.
  explicit ValidatedBank(QuestionBank bank);

  const QuestionBank& data() const noexcept { return bank_; }
  const std::vector<Section>& sections() const noexcept { return bank_.sections; }
  const std::vector<Recommendation>& recommendations() const noexcept {
    return bank_.recommendations;
  }
  const BankDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  std::size_t mandatory_section() const noexcept { return mandatory_; }
  std::size_t question_count() const noexcept { return questions_.size(); }
  std::size_t answer_count() const noexcept { return answers_.size(); }

  std::optional<std::size_t> find_section(std::string_view id) const;
  std::optional<QuestionRef> find_question(std::string_view id) const;
  std::optional<AnswerRef> find_answer(std::string_view id) const;

  std::size_t section_index(std::string_view id) const;
  QuestionRef question_ref(std::string_view id) const;
  AnswerRef answer_ref(std::string_view id) const;

  const Section& section(std::size_t index) const { return bank_.sections.at(index); }
  const Question& question(QuestionRef ref) const {
    return bank_.sections.at(ref.section).questions.at(ref.question);
  }
  const Answer& answer(AnswerRef ref) const {
    return question({ref.section, ref.question}).answers.at(ref.answer);
  }

 private:
  QuestionBank bank_;
  BankDiagnostics diagnostics_;
  std::size_t mandatory_ = 0;
  std::unordered_map<std::string, std::size_t> sections_;
  std::unordered_map<std::string, QuestionRef> questions_;
  std::unordered_map<std::string, AnswerRef> answers_;
};

/// Parse + validate. Throws BankParseError or BankRejected (and BankIoError
/// for the file variant).
ValidatedBank load_bank(std::string_view source);
ValidatedBank load_bank_file(const std::string& path);

}  // namespace qwatch
