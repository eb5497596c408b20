#include "qwatch/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>

#include "qwatch/bank.hpp"
#include "qwatch/chain.hpp"
#include "qwatch/oracle.hpp"
#include "qwatch/payload.hpp"
#include "qwatch/scoring.hpp"
#include "qwatch/service.hpp"

namespace qwatch::cli {

namespace {

/// Carries an exit code out of a command.
struct Exit {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BankIoError("cannot read '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) throw BankIoError("cannot write '" + path + "'");
}

void print_findings(const BankDiagnostics& diagnostics, std::ostream& os) {
  for (const Finding& f : diagnostics.findings) {
    os << std::left << std::setw(8) << to_string(f.severity) << std::setw(24) << f.code << std::setw(12)
       << f.subject_id << ' ' << f.message << '\n';
  }
  os << diagnostics.error_count() << " error(s), " << diagnostics.warning_count() << " warning(s)\n";
}

void print_violations(const std::vector<Violation>& violations, std::ostream& os) {
  for (const Violation& v : violations) {
    os << "violation " << v.code << " [" << v.subject_id << "]: " << v.message << '\n';
  }
}

/// Loads a bank for the engine-facing commands, mapping failures to exit codes.
std::shared_ptr<const ValidatedBank> load(const std::string& path, std::ostream& err) {
  try {
    return std::make_shared<const ValidatedBank>(load_bank_file(path));
  } catch (const BankIoError& e) {
    err << "error: " << e.what() << '\n';
    throw Exit{kIo};
  } catch (const BankParseError& e) {
    err << "error: " << path << ": " << e.what() << '\n';
    throw Exit{kIo};
  } catch (const BankRejected& e) {
    err << "error: " << path << " failed validation\n";
    print_findings(e.diagnostics(), err);
    throw Exit{kRejected};
  }
}

void print_recommendations(std::span<const TriggeredRecommendation> recs, std::ostream& os) {
  std::size_t rank = 1;
  for (const auto& rec : recs) {
    os << "  " << rank++ << ". [importance " << rec.importance << "] " << rec.text << '\n';
    if (rec.resource_link) os << "     see: " << *rec.resource_link << '\n';
  }
}

void print_result(const AssessmentResult& result, bool show_risk_value, bool show_all, std::ostream& os) {
  os << "Risk category: " << to_string(result.risk_category) << '\n';
  if (show_risk_value) {
    os << "Risk value: " << std::fixed << std::setprecision(2) << result.risk_percent() << "% ("
       << result.breakdown.numerator << '/' << result.breakdown.denominator << ")\n";
    os.unsetf(std::ios::floatfield);
  }
  os << result.category_explanation << '\n';
  os << "Recommendations: " << result.recommendations_all.size() << '\n';
  if (result.recommendations_all.empty()) {
    os << "  No recommendations for these answers.\n";
    return;
  }
  if (show_all) {
    print_recommendations(result.recommendations_all, os);
  } else {
    print_recommendations(result.recommendations_top(), os);
  }
}

std::vector<std::string> with_mandatory(const ValidatedBank& bank, std::vector<std::string> sections) {
  const std::string& mandatory = bank.section(bank.mandatory_section()).id;
  if (std::find(sections.begin(), sections.end(), mandatory) == sections.end()) {
    sections.insert(sections.begin(), mandatory);
  }
  return sections;
}

std::vector<std::string> all_sections(const ValidatedBank& bank) {
  std::vector<std::string> ids;
  for (const Section& section : bank.sections()) ids.push_back(section.id);
  return ids;
}

void require_known_sections(const ValidatedBank& bank, const std::vector<std::string>& ids, std::ostream& err) {
  for (const std::string& id : ids) {
    if (!bank.find_section(id)) {
      err << "error: unknown section id '" << id << "'\n";
      throw Exit{kRejected};
    }
  }
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& path, bool strict_warnings, bool as_json, std::ostream& out,
                 std::ostream& err) {
  QuestionBank bank;
  try {
    bank = parse_bank(read_file(path));
  } catch (const BankIoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const BankParseError& e) {
    err << "error: " << path << ": " << e.what() << '\n';
    return kIo;
  }
  const BankDiagnostics diagnostics = validate_bank(bank);
  if (as_json) {
    out << payload::diagnostics(diagnostics).dump(2) << '\n';
  } else {
    print_findings(diagnostics, out);
  }
  if (diagnostics.error_count() > 0) return kRejected;
  if (strict_warnings && diagnostics.warning_count() > 0) return kRejected;
  return kOk;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string bank_path;
  std::vector<std::string> sections;
  std::string answers_out;
  std::string resume;
  bool show_all = false;
};

std::vector<std::string> split_ids(const std::string& line) {
  std::vector<std::string> ids;
  std::string token;
  for (char c : line + " ") {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) ids.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  return ids;
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return text.substr(first, text.find_last_not_of(" \t\r") - first + 1);
}

class Session {
 public:
  Session(const ValidatedBank& bank, Selection selection, std::istream& in, std::ostream& out)
      : bank_(bank), selection_(std::move(selection)), in_(in), out_(out) {}

  /// Walks every selected section. Returns false if input ended early.
  bool walk() {
    for (const Section& section : bank_.sections()) {
      const auto& ids = selection_.section_ids;
      if (std::find(ids.begin(), ids.end(), section.id) == ids.end()) continue;
      out_ << "\n== " << section.name << " (about " << section.time_estimate_minutes << " min) ==\n";
      if (!walk_section(section)) return false;
    }
    return true;
  }

  const Selection& selection() const { return selection_; }
  std::size_t questions_asked() const { return asked_; }

 private:
  bool walk_section(const Section& section) {
    auto current = next_question(bank_, section.id, std::nullopt, selection_);
    while (current) {
      const Question& question = section.questions[*current];
      show(section, *current);
      ++asked_;
      std::string line;
      for (;;) {
        if (!std::getline(in_, line)) return false;
        line = trim(line);
        if (line == "?") {
          out_ << (question.help ? *question.help : std::string("No help is available for this question.")) << '\n';
          show(section, *current);
          continue;
        }
        break;
      }
      if (line == "<") {
        if (auto previous = prev_question(bank_, section.id, current, selection_)) {
          current = previous;
        } else {
          out_ << "(already at the first question of this section)\n";
        }
        continue;
      }
      if (!line.empty() && !answer(question, split_ids(line))) continue;
      current = next_question(bank_, section.id, current, selection_);
    }
    return true;
  }

  void show(const Section& section, std::size_t index) {
    const Question& question = section.questions[index];
    const std::unordered_set<std::string> chosen(selection_.answer_ids.begin(), selection_.answer_ids.end());
    out_ << "\n[" << (question.choice_type == ChoiceType::single ? "Single choice" : "Multiple choice")
         << "] Question " << index + 1 << " of " << section.questions.size() << ": " << question.text << '\n';
    for (const Answer& a : question.answers) {
      out_ << "  " << (chosen.count(a.id) != 0 ? "[x] " : "[ ] ") << a.id << "  " << a.text << '\n';
    }
    out_ << "answer id(s), blank to continue, '<' for previous" << (question.help ? ", '?' for help" : "") << "> ";
  }

  bool answer(const Question& question, const std::vector<std::string>& ids) {
    for (const std::string& id : ids) {
      const bool belongs = std::any_of(question.answers.begin(), question.answers.end(),
                                       [&](const Answer& a) { return a.id == id; });
      if (!belongs) {
        out_ << "'" << id << "' is not an answer of this question\n";
        return false;
      }
    }
    if (question.choice_type == ChoiceType::single && ids.size() > 1) {
      out_ << "this question accepts a single answer\n";
      return false;
    }
    // A new answer replaces the question's previous answers.
    std::erase_if(selection_.answer_ids, [&](const std::string& id) {
      return std::any_of(question.answers.begin(), question.answers.end(),
                         [&](const Answer& a) { return a.id == id; });
    });
    for (const std::string& id : ids) {
      if (std::find(selection_.answer_ids.begin(), selection_.answer_ids.end(), id) == selection_.answer_ids.end()) {
        selection_.answer_ids.push_back(id);
      }
    }
    selection_ = prune_hidden_answers(bank_, std::move(selection_));
    return true;
  }

  const ValidatedBank& bank_;
  Selection selection_;
  std::istream& in_;
  std::ostream& out_;
  std::size_t asked_ = 0;
};

int cmd_run(const RunOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto bank = load(options.bank_path, err);
  Selection start;
  if (!options.resume.empty()) {
    try {
      start = payload::parse_selection(read_file(options.resume));
    } catch (const BankIoError& e) {
      err << "error: " << e.what() << '\n';
      return kIo;
    } catch (const payload::RequestError& e) {
      err << "error: " << options.resume << ": " << e.what() << '\n';
      return kIo;
    }
  }
  std::vector<std::string> sections = options.sections;
  if (sections.empty()) sections = start.section_ids.empty() ? all_sections(*bank) : start.section_ids;
  require_known_sections(*bank, sections, err);
  start.section_ids = with_mandatory(*bank, sections);
  for (const std::string& id : start.answer_ids) {
    if (!bank->find_answer(id)) {
      err << "error: unknown answer id '" << id << "' in " << options.resume << '\n';
      return kRejected;
    }
  }
  start = prune_hidden_answers(*bank, std::move(start));

  Session session(*bank, std::move(start), in, out);
  const bool finished = session.walk();
  const std::string saved = payload::selection_json(session.selection()).dump(2) + "\n";
  if (!options.answers_out.empty()) write_file(options.answers_out, saved);
  if (!finished) {
    out << '\n';
    err << "input ended before the questionnaire was complete";
    if (!options.answers_out.empty()) err << "; partial answers saved to " << options.answers_out << " (continue with --resume)";
    err << '\n';
    return kIo;
  }

  if (auto violations = check_selection(*bank, session.selection()); !violations.empty()) {
    print_violations(violations, err);
    return kRejected;
  }
  const AssessmentResult result = assemble_result(*bank, session.selection());
  out << "\n== Results ==\n";
  print_result(result, false, options.show_all, out);
  if (!options.show_all && result.recommendations_all.size() > kTopRecommendations) {
    out << "Show all " << result.recommendations_all.size() << " recommendations? [y/N] ";
    std::string reply;
    if (std::getline(in, reply) && (trim(reply) == "y" || trim(reply) == "Y")) {
      out << '\n';
      print_recommendations(result.recommendations_all, out);
    } else {
      out << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// score

int cmd_score(const std::string& bank_path, const std::string& answers_path, bool as_json, bool show_risk_value,
              std::ostream& out, std::ostream& err) {
  const auto bank = load(bank_path, err);
  Selection selection;
  try {
    selection = payload::parse_selection(read_file(answers_path));
  } catch (const BankIoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const payload::RequestError& e) {
    err << "error: " << answers_path << ": " << e.what() << '\n';
    return kIo;
  }
  if (auto violations = check_selection(*bank, selection); !violations.empty()) {
    if (as_json) {
      out << payload::violations(violations).dump(2) << '\n';
    } else {
      print_violations(violations, err);
    }
    return kRejected;
  }
  const AssessmentResult result = assemble_result(*bank, selection);
  if (as_json) {
    out << payload::result(result, show_risk_value).dump(2) << '\n';
  } else {
    print_result(result, show_risk_value, true, out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// explore

int cmd_explore(const std::string& bank_path, std::vector<std::string> sections, std::size_t limit, bool as_json,
                std::ostream& out, std::ostream& err) {
  const auto bank = load(bank_path, err);
  if (limit == 0) {
    err << "error: --limit must be positive\n";
    return kUsage;
  }
  if (sections.empty()) sections = all_sections(*bank);
  require_known_sections(*bank, sections, err);
  const oracle::AnswerSpaceReport report = oracle::report(*bank, sections, limit);
  if (as_json) {
    out << payload::report(report).dump(2) << '\n';
    return kOk;
  }
  out << "assignments: " << report.assignments_enumerated << (report.truncated ? " (truncated at limit)" : " (complete)")
      << '\n';
  out << std::fixed << std::setprecision(2) << "risk: min " << report.min_risk << "%  max " << report.max_risk
      << "%\n";
  out.unsetf(std::ios::floatfield);
  out << "categories:";
  for (const auto& [category, count] : report.category_counts) out << ' ' << to_string(category) << ' ' << count;
  out << '\n';
  if (!report.per_recommendation_trigger_counts.empty()) {
    out << "recommendation triggers:\n";
    for (const Recommendation& rec : bank->recommendations()) {
      auto it = report.per_recommendation_trigger_counts.find(rec.id);
      if (it != report.per_recommendation_trigger_counts.end()) out << "  " << rec.id << ' ' << it->second << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// serve

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

int cmd_serve(const std::string& bank_path, const std::string& addr, ServiceConfig config, std::ostream& err) {
  const auto bank = load(bank_path, err);
  std::pair<std::string, int> endpoint;
  try {
    endpoint = parse_listen_address(addr);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const AssessmentService service(bank, std::move(config));
  try {
    HttpServer server(service);
    const int port = server.start(endpoint.first, endpoint.second);
    err << "serving " << bank_path << " (" << bank->sections().size() << " sections, " << bank->question_count()
        << " questions, " << bank->answer_count() << " answers, " << bank->recommendations().size()
        << " recommendations) on " << endpoint.first << ':' << port << '\n';
    g_stop_requested = false;
    std::signal(SIGINT, on_stop_signal);
    std::signal(SIGTERM, on_stop_signal);
    while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum threat readiness assessment engine", "qwatch"};
  app.require_subcommand(1);

  std::string bank_path;
  bool strict_warnings = false;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate", "Check a question bank and print findings");
  validate->add_option("bank-path", bank_path, "Question bank JSON file")->required();
  validate->add_flag("--strict-warnings", strict_warnings, "Treat warnings as failures");
  validate->add_flag("--json", as_json, "Print findings as JSON");

  RunOptions run_options;
  auto* run_cmd = app.add_subcommand("run", "Answer the questionnaire in the terminal");
  run_cmd->add_option("bank-path", run_options.bank_path, "Question bank JSON file")->required();
  run_cmd->add_option("--sections", run_options.sections, "Sections to answer (mandatory one is implied)")
      ->delimiter(',');
  run_cmd->add_option("--answers-out", run_options.answers_out, "Write the selection document here");
  run_cmd->add_option("--resume", run_options.resume, "Start from a saved selection document");
  run_cmd->add_flag("--all", run_options.show_all, "Print every recommendation, not just the top five");

  std::string answers_path;
  bool show_risk_value = false;
  auto* score = app.add_subcommand("score", "Score a saved selection document");
  score->add_option("bank-path", bank_path, "Question bank JSON file")->required();
  score->add_option("answers-path", answers_path, "Selection document")->required();
  score->add_flag("--json", as_json, "Print the results payload as JSON");
  score->add_flag("--show-risk-value", show_risk_value, "Include the numeric risk value");

  std::vector<std::string> sections;
  std::size_t limit = oracle::kDefaultLimit;
  auto* explore = app.add_subcommand("explore", "Enumerate the answer space and report risk extremes");
  explore->add_option("bank-path", bank_path, "Question bank JSON file")->required();
  explore->add_option("--sections", sections, "Sections to enumerate")->delimiter(',');
  explore->add_option("--limit", limit, "Maximum number of assignments to enumerate");
  explore->add_flag("--json", as_json, "Print the report as JSON");

  std::string addr = "127.0.0.1:8080";
  ServiceConfig config;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("bank-path", bank_path, "Question bank JSON file")->envname("BANK_PATH")->required();
  serve->add_option("--addr", addr, "Listen address host:port")->envname("LISTEN_ADDR");
  serve->add_flag("--expose-risk-value", config.expose_risk_value, "Include the numeric risk in results")
      ->envname("EXPOSE_RISK_VALUE");
  serve->add_option("--static-dir", static_dir, "Serve the web UI bundle from this directory");
  serve->add_option("--cors-origin", config.cors_origins, "Allowed CORS origin (repeatable, '*' for any)")
      ->delimiter(',')
      ->envname("CORS_ORIGINS");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(bank_path, strict_warnings, as_json, out, err);
    if (*run_cmd) return cmd_run(run_options, in, out, err);
    if (*score) return cmd_score(bank_path, answers_path, as_json, show_risk_value, out, err);
    if (*explore) return cmd_explore(bank_path, sections, limit, as_json, out, err);
    if (*serve) {
      if (!static_dir.empty()) config.static_dir = static_dir;
      return cmd_serve(bank_path, addr, std::move(config), err);
    }
  } catch (const Exit& e) {
    return e.code;
  } catch (const BankIoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace qwatch::cli
