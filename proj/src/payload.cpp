#include "qwatch/payload.hpp"

namespace qwatch::payload {

namespace {

std::vector<std::string> string_list(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw RequestError(std::string("missing required field '") + key + "'");
  if (!it->is_array()) throw RequestError(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) throw RequestError(std::string("field '") + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Json nullable(const std::optional<std::string>& value) {
  return value ? Json(*value) : Json(nullptr);
}

Json recommendation(const TriggeredRecommendation& rec) {
  Json out;
  out["id"] = rec.recommendation_id;
  out["text"] = rec.text;
  out["importance"] = rec.importance;
  out["question_id"] = rec.question_id;
  out["resource_link"] = nullable(rec.resource_link);
  return out;
}

}  // namespace

Selection parse_selection(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw RequestError("malformed JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw RequestError("request body must be a JSON object");
  for (const auto& item : doc.items()) {
    if (item.key() != "section_ids" && item.key() != "answer_ids") {
      throw RequestError("unknown field '" + item.key() + "'");
    }
  }
  return Selection{string_list(doc, "section_ids"), string_list(doc, "answer_ids")};
}

Json selection_json(const Selection& selection) {
  Json out;
  out["section_ids"] = selection.section_ids;
  out["answer_ids"] = selection.answer_ids;
  return out;
}

Json sections(const ValidatedBank& bank) {
  Json list = Json::array();
  for (const Section& section : bank.sections()) {
    Json entry;
    entry["id"] = section.id;
    entry["name"] = section.name;
    entry["description"] = section.description;
    entry["mandatory"] = section.mandatory;
    entry["time_estimate_minutes"] = section.time_estimate_minutes;
    list.push_back(std::move(entry));
  }
  Json out;
  out["sections"] = std::move(list);
  return out;
}

Json questions(const ValidatedBank& bank, std::size_t section_index) {
  const Section& section = bank.section(section_index);
  Json list = Json::array();
  for (const Question& question : section.questions) {
    Json answers = Json::array();
    for (const Answer& answer : question.answers) {
      Json a;
      a["id"] = answer.id;
      a["text"] = answer.text;
      answers.push_back(std::move(a));
    }
    Json entry;
    entry["id"] = question.id;
    entry["text"] = question.text;
    entry["choice_type"] = to_string(question.choice_type);
    entry["answers"] = std::move(answers);
    entry["help"] = nullable(question.help);
    entry["trigger_answer_ids"] = question.trigger_answer_ids;
    list.push_back(std::move(entry));
  }
  Json out;
  out["section_id"] = section.id;
  out["questions"] = std::move(list);
  return out;
}

Json result(const AssessmentResult& result, bool include_risk_value) {
  Json out;
  out["risk_category"] = to_string(result.risk_category);
  out["category_explanation"] = result.category_explanation;
  out["recommendation_count"] = result.recommendations_all.size();
  Json top = Json::array();
  for (const auto& rec : result.recommendations_top()) top.push_back(recommendation(rec));
  Json all = Json::array();
  for (const auto& rec : result.recommendations_all) all.push_back(recommendation(rec));
  out["recommendations_top"] = std::move(top);
  out["recommendations_all"] = std::move(all);
  if (include_risk_value) {
    Json diag;
    diag["risk_percent"] = result.breakdown.risk_percent;
    diag["numerator"] = result.breakdown.numerator;
    diag["denominator"] = result.breakdown.denominator;
    out["diagnostics"] = std::move(diag);
  }
  return out;
}

Json violations(const std::vector<Violation>& violations) {
  Json list = Json::array();
  for (const Violation& v : violations) {
    Json entry;
    entry["code"] = v.code;
    entry["subject_id"] = v.subject_id;
    entry["message"] = v.message;
    list.push_back(std::move(entry));
  }
  Json out;
  out["error"] = "validation-error";
  out["violations"] = std::move(list);
  return out;
}

Json error(std::string_view code, std::string_view message) {
  Json out;
  out["error"] = code;
  out["message"] = message;
  return out;
}

Json not_found(std::string_view id, std::string_view message) {
  Json out = error("not-found", message);
  out["id"] = id;
  return out;
}

Json report(const oracle::AnswerSpaceReport& report) {
  Json out;
  out["assignments_enumerated"] = report.assignments_enumerated;
  out["truncated"] = report.truncated;
  out["min_risk"] = report.min_risk;
  out["max_risk"] = report.max_risk;
  Json categories;
  for (const auto& [category, count] : report.category_counts) categories[std::string(to_string(category))] = count;
  out["category_counts"] = std::move(categories);
  Json recs = Json::object();
  for (const auto& [id, count] : report.per_recommendation_trigger_counts) recs[id] = count;
  out["per_recommendation_trigger_counts"] = std::move(recs);
  return out;
}

Json diagnostics(const BankDiagnostics& diagnostics) {
  Json list = Json::array();
  for (const Finding& f : diagnostics.findings) {
    Json entry;
    entry["severity"] = to_string(f.severity);
    entry["code"] = f.code;
    entry["subject_id"] = f.subject_id;
    entry["message"] = f.message;
    list.push_back(std::move(entry));
  }
  Json out;
  out["errors"] = diagnostics.error_count();
  out["warnings"] = diagnostics.warning_count();
  out["findings"] = std::move(list);
  return out;
}

}  // namespace qwatch::payload
