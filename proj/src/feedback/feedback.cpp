#include "fbrl/feedback/feedback.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace fbrl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kKnownFields = {
    "task",        "outcome",           "primary_error", "secondary_factors",
    "key_frame_indices", "suggested_fix", "confidence",  "summary"};

void add(std::vector<FieldError>& errs, std::string field, std::string msg) {
  errs.push_back({std::move(field), std::move(msg)});
}

}  // namespace

ValidationResult validate_feedback(const std::string& raw, std::optional<int> episode_len) {
  ValidationResult res;
  auto& errs = res.errors;

  json j = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    add(errs, "$", "malformed JSON");
    return res;
  }
  if (!j.is_object()) {
    add(errs, "$", "top-level value must be an object");
    return res;
  }

  for (const auto& [key, _] : j.items())
    if (!kKnownFields.count(key)) add(errs, key, "unknown field");

  Feedback fb;

  // task
  if (!j.contains("task"))
    add(errs, "task", "missing field");
  else if (!j["task"].is_string())
    add(errs, "task", "must be a string");
  else {
    fb.task = j["task"].get<std::string>();
    if (fb.task.empty()) add(errs, "task", "must be nonempty");
  }

  // outcome
  bool have_outcome = false;
  if (!j.contains("outcome"))
    add(errs, "outcome", "missing field");
  else if (!j["outcome"].is_string())
    add(errs, "outcome", "must be a string");
  else {
    const std::string o = j["outcome"].get<std::string>();
    if (o == "success") {
      fb.success = true;
      have_outcome = true;
    } else if (o == "failure") {
      fb.success = false;
      have_outcome = true;
    } else {
      add(errs, "outcome", "must be \"success\" or \"failure\"");
    }
  }

  // primary_error { code, explanation }
  bool have_code = false;
  if (!j.contains("primary_error"))
    add(errs, "primary_error", "missing field");
  else if (!j["primary_error"].is_object())
    add(errs, "primary_error", "must be an object");
  else {
    const json& pe = j["primary_error"];
    for (const auto& [key, _] : pe.items())
      if (key != "code" && key != "explanation")
        add(errs, "primary_error." + key, "unknown field");
    if (!pe.contains("code"))
      add(errs, "primary_error.code", "missing field");
    else if (!pe["code"].is_string())
      add(errs, "primary_error.code", "must be a string");
    else if (auto c = parse_error_code(pe["code"].get<std::string>())) {
      fb.primary_code = *c;
      have_code = true;
    } else {
      add(errs, "primary_error.code",
          "unknown error code \"" + pe["code"].get<std::string>() + "\"");
    }
    if (!pe.contains("explanation"))
      add(errs, "primary_error.explanation", "missing field");
    else if (!pe["explanation"].is_string())
      add(errs, "primary_error.explanation", "must be a string");
    else
      fb.primary_explanation = pe["explanation"].get<std::string>();
  }

  // secondary_factors
  if (!j.contains("secondary_factors"))
    add(errs, "secondary_factors", "missing field");
  else if (!j["secondary_factors"].is_array())
    add(errs, "secondary_factors", "must be an array");
  else {
    for (const json& item : j["secondary_factors"]) {
      if (!item.is_string()) {
        add(errs, "secondary_factors", "entries must be strings");
        continue;
      }
      auto c = parse_error_code(item.get<std::string>());
      if (!c)
        add(errs, "secondary_factors",
            "unknown error code \"" + item.get<std::string>() + "\"");
      else if (*c == ErrorCode::good_grasp)
        add(errs, "secondary_factors", "success code not allowed as a factor");
      else
        fb.secondary_factors.push_back(*c);
    }
  }

  // key_frame_indices
  if (!j.contains("key_frame_indices"))
    add(errs, "key_frame_indices", "missing field");
  else if (!j["key_frame_indices"].is_array())
    add(errs, "key_frame_indices", "must be an array");
  else {
    for (const json& item : j["key_frame_indices"]) {
      if (!item.is_number_integer()) {
        add(errs, "key_frame_indices", "entries must be integers");
        continue;
      }
      const int idx = item.get<int>();
      if (idx < 0)
        add(errs, "key_frame_indices", "indices must be nonnegative");
      else if (episode_len && idx >= *episode_len)
        add(errs, "key_frame_indices",
            "index " + std::to_string(idx) + " outside episode of length " +
                std::to_string(*episode_len));
      else
        fb.key_frame_indices.push_back(idx);
    }
  }

  // suggested_fix
  bool have_fix = false;
  if (!j.contains("suggested_fix"))
    add(errs, "suggested_fix", "missing field");
  else if (!j["suggested_fix"].is_string())
    add(errs, "suggested_fix", "must be a string");
  else {
    fb.suggested_fix = j["suggested_fix"].get<std::string>();
    have_fix = true;
  }

  // confidence
  if (!j.contains("confidence"))
    add(errs, "confidence", "missing field");
  else if (!j["confidence"].is_number())
    add(errs, "confidence", "must be a number");
  else {
    fb.confidence = j["confidence"].get<double>();
    if (!(fb.confidence >= 0.0 && fb.confidence <= 1.0))
      add(errs, "confidence", "must lie in [0, 1]");
  }

  // summary
  if (!j.contains("summary"))
    add(errs, "summary", "missing field");
  else if (!j["summary"].is_string())
    add(errs, "summary", "must be a string");
  else
    fb.summary = j["summary"].get<std::string>();

  // Cross-field consistency (only checked once the parts parsed).
  if (have_outcome && have_code) {
    if (fb.success && fb.primary_code != ErrorCode::good_grasp)
      add(errs, "outcome", "success requires primary_error.code good_grasp");
    if (!fb.success && fb.primary_code == ErrorCode::good_grasp)
      add(errs, "outcome", "failure cannot carry success code good_grasp");
  }
  if (have_outcome && fb.success) {
    if (have_fix && fb.suggested_fix != "(n/a)")
      add(errs, "suggested_fix", "must be \"(n/a)\" on success");
    if (j.contains("secondary_factors") && j["secondary_factors"].is_array() &&
        !j["secondary_factors"].empty())
      add(errs, "secondary_factors", "must be empty on success");
  }

  if (errs.empty()) res.feedback = std::move(fb);
  return res;
}

std::string serialize_feedback(const Feedback& fb) {
  ordered_json j;
  j["task"] = fb.task;
  j["outcome"] = fb.success ? "success" : "failure";
  j["primary_error"] = {{"code", std::string(to_string(fb.primary_code))},
                        {"explanation", fb.primary_explanation}};
  ordered_json sec = ordered_json::array();
  for (ErrorCode c : fb.secondary_factors) sec.push_back(std::string(to_string(c)));
  j["secondary_factors"] = sec;
  j["key_frame_indices"] = fb.key_frame_indices;
  j["suggested_fix"] = fb.suggested_fix;
  j["confidence"] = fb.confidence;
  j["summary"] = fb.summary;
  return j.dump();
}

}  // namespace fbrl
