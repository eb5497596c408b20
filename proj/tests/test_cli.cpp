#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwatch/cli.hpp"
#include "support/fixtures.hpp"

using namespace qwatch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("qwatch-cli-" + std::to_string(++counter_))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

const std::string kMb1 = qwatch::testing::mb1_path();
const std::string kShipped = qwatch::testing::shipped_bank_path();

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("validate") {
  const Outcome ok = invoke({"validate", kShipped});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("0 error(s), 0 warning(s)") != std::string::npos);
  CHECK(invoke({"validate", kShipped, "--strict-warnings"}).code == cli::kOk);

  TempDir dir;
  QuestionBank bad = qwatch::testing::mb1_data();
  bad.sections[0].questions[0].answers[0].risk_score = 9;
  const Outcome rejected = invoke({"validate", dir.file("bad.json", serialize_bank(bad))});
  CHECK(rejected.code == cli::kRejected);
  CHECK(rejected.out.find("risk-range") != std::string::npos);

  QuestionBank helpless = qwatch::testing::mb1_data();
  const std::string helpless_path = dir.file("warn.json", serialize_bank(helpless));
  CHECK(invoke({"validate", helpless_path}).code == cli::kOk);
  CHECK(invoke({"validate", helpless_path, "--strict-warnings"}).code == cli::kRejected);

  const Outcome as_json = invoke({"validate", helpless_path, "--json"});
  const auto j = nlohmann::json::parse(as_json.out);
  CHECK(j["errors"] == 0);
  CHECK(j["warnings"].get<int>() >= 1);

  CHECK(invoke({"validate", dir.path("missing.json")}).code == cli::kIo);
  CHECK(invoke({"validate", dir.file("broken.json", "{\"format_version\": ")}).code == cli::kIo);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kUsage);
  CHECK(invoke({"validate"}).code == cli::kUsage);
  CHECK(invoke({"score", kMb1}).code == cli::kUsage);
  CHECK(invoke({"explore", kMb1, "--limit", "0"}).code == cli::kUsage);
  const Outcome help = invoke({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("validate") != std::string::npos);
}

TEST_CASE("scripted run reaches the high category") {
  TempDir dir;
  const std::string saved = dir.path("answers.json");
  const Outcome r = invoke({"run", kMb1, "--answers-out", saved}, "a3\nb3\nc2\n");
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("Risk category: high") != std::string::npos);
  CHECK(count(r.out, "] Question ") == 3);
  CHECK(r.out.find("Risk value") == std::string::npos);

  // Scoring the saved answers reproduces the result.
  const Outcome scored = invoke({"score", kMb1, saved, "--show-risk-value"});
  CHECK(scored.code == cli::kOk);
  CHECK(scored.out.find("Risk category: high") != std::string::npos);
  CHECK(scored.out.find("80.00% (8/10)") != std::string::npos);
}

TEST_CASE("run skips hidden chained questions") {
  const Outcome r = invoke({"run", kMb1}, "a1\nb1\n");
  CHECK(r.code == cli::kOk);
  CHECK(count(r.out, "] Question ") == 2);
  CHECK(r.out.find("Risk category: low") != std::string::npos);
}

TEST_CASE("run shows help and moves backwards") {
  const Outcome r = invoke({"run", kMb1}, "?\na3\n<\na1\n\n");
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("Check the cipher suites") != std::string::npos);
  // Going back and replacing a3 with a1 hides Q3 again.
  CHECK(r.out.find("Is the unprotected traffic internet facing?") == std::string::npos);
  CHECK(r.out.find("Risk category: low") != std::string::npos);
}

TEST_CASE("run rejects invalid answers and asks again") {
  const Outcome r = invoke({"run", kMb1}, "zz\na1 a2\na2\nb3\n");
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("'zz' is not an answer of this question") != std::string::npos);
  CHECK(r.out.find("accepts a single answer") != std::string::npos);
  CHECK(r.out.find("Risk category: medium") != std::string::npos);
}

TEST_CASE("run saves partial answers and resumes") {
  TempDir dir;
  const std::string saved = dir.path("partial.json");
  const Outcome partial = invoke({"run", kMb1, "--answers-out", saved}, "a3\n");
  CHECK(partial.code == cli::kIo);
  const auto j = nlohmann::json::parse(qwatch::testing::read_text(saved));
  CHECK(j["answer_ids"] == nlohmann::json::array({"a3"}));

  const Outcome resumed = invoke({"run", kMb1, "--resume", saved}, "\nb3\nc2\n");
  CHECK(resumed.code == cli::kOk);
  CHECK(resumed.out.find("[x] a3") != std::string::npos);
  CHECK(resumed.out.find("Risk category: high") != std::string::npos);
}

TEST_CASE("run offers the full recommendation list") {
  TempDir dir;
  const std::string bank = dir.file("seven.json", serialize_bank(qwatch::testing::seven_recommendations_data()));
  const Outcome declined = invoke({"run", bank}, "m1,m2,m3,m4,m5,m6,m7\nn\n");
  CHECK(declined.code == cli::kOk);
  CHECK(declined.out.find("Show all 7 recommendations? [y/N]") != std::string::npos);
  CHECK(count(declined.out, "[importance ") == 5);

  const Outcome accepted = invoke({"run", bank}, "m1,m2,m3,m4,m5,m6,m7\ny\n");
  CHECK(count(accepted.out, "[importance ") == 12);
  CHECK(count(invoke({"run", bank, "--all"}, "m1 m2 m3 m4 m5 m6 m7\n").out, "[importance ") == 7);
}

TEST_CASE("run on the shipped bank with one optional section") {
  const Outcome r = invoke({"run", kShipped, "--sections", "software"}, std::string(200, '\n'));
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("== General Information") != std::string::npos);
  CHECK(r.out.find("== Software Information") != std::string::npos);
  CHECK(r.out.find("== Cloud") == std::string::npos);
  CHECK(invoke({"run", kShipped, "--sections", "nope"}).code == cli::kRejected);
}

TEST_CASE("score") {
  TempDir dir;
  const std::string good = dir.file("good.json", R"({"section_ids":["S1"],"answer_ids":["a2","b1","b3"]})");
  const Outcome text = invoke({"score", kMb1, good, "--show-risk-value"});
  CHECK(text.code == cli::kOk);
  CHECK(text.out.find("71.43% (5/7)") != std::string::npos);

  const Outcome as_json = invoke({"score", kMb1, good, "--json", "--show-risk-value"});
  const auto j = nlohmann::json::parse(as_json.out);
  CHECK(j["risk_category"] == "high");
  CHECK(j["diagnostics"]["numerator"] == 5);
  CHECK(j["diagnostics"]["denominator"] == 7);

  const std::string hidden = dir.file("hidden.json", R"({"section_ids":["S1"],"answer_ids":["a1","c2"]})");
  const Outcome rejected = invoke({"score", kMb1, hidden});
  CHECK(rejected.code == cli::kRejected);
  CHECK(rejected.err.find("hidden-question-answer") != std::string::npos);
  const Outcome rejected_json = invoke({"score", kMb1, hidden, "--json"});
  CHECK(nlohmann::json::parse(rejected_json.out)["error"] == "validation-error");

  CHECK(invoke({"score", kMb1, dir.path("missing.json")}).code == cli::kIo);
  CHECK(invoke({"score", kMb1, dir.file("junk.json", "[1,2]")}).code == cli::kIo);
  CHECK(invoke({"score", dir.path("nobank.json"), good}).code == cli::kIo);
}

TEST_CASE("explore") {
  const Outcome r = invoke({"explore", kMb1});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("assignments: 48 (complete)") != std::string::npos);
  CHECK(r.out.find("risk: min 0.00%  max 100.00%") != std::string::npos);
  CHECK(r.out.find("  R1 32") != std::string::npos);

  const Outcome truncated = invoke({"explore", kMb1, "--limit", "5"});
  CHECK(truncated.out.find("assignments: 5 (truncated at limit)") != std::string::npos);

  const auto j = nlohmann::json::parse(invoke({"explore", kMb1, "--json"}).out);
  CHECK(j["assignments_enumerated"] == 48);
  CHECK(j["max_risk"] == 100.0);

  const Outcome section = invoke({"explore", kShipped, "--sections", "software"});
  CHECK(section.code == cli::kOk);
  CHECK(section.out.find("(complete)") != std::string::npos);
  CHECK(invoke({"explore", kShipped, "--sections", "nope"}).code == cli::kRejected);
}
