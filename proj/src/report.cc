/* Copyright 2026 The parteval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "parteval/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace parteval {

using nlohmann::json;
using nlohmann::ordered_json;

bool EvalSettings::operator==(const EvalSettings& o) const {
  return config.thresholds == o.config.thresholds &&
         config.aggregation == o.config.aggregation &&
         config.score_fn == o.config.score_fn &&
         config.accuracy_reference == o.config.accuracy_reference &&
         config.coverage_policy == o.config.coverage_policy &&
         class_modes == o.class_modes && methods == o.methods;
}

bool MetricReport::operator==(const MetricReport& o) const {
  return model_id == o.model_id && dataset_name == o.dataset_name &&
         settings == o.settings && results == o.results;
}

namespace {

ordered_json settings_json(const EvalSettings& s) {
  ordered_json doc;
  doc["thresholds"] = s.config.thresholds;
  doc["aggregation"] = to_string(s.config.aggregation);
  ordered_json modes = ordered_json::array();
  for (ClassMode m : s.class_modes) modes.push_back(to_string(m));
  doc["class_modes"] = std::move(modes);
  doc["score_fn"] = to_string(s.config.score_fn);
  doc["accuracy_reference"] =
      s.config.accuracy_reference ? to_string(*s.config.accuracy_reference)
                                  : std::string_view("auto");
  doc["coverage_policy"] = to_string(s.config.coverage_policy);
  if (s.methods) {
    doc["methods"] = *s.methods;
  } else {
    doc["methods"] = nullptr;
  }
  return doc;
}

EvalSettings settings_from(const json& doc, const std::string& source,
                           EvalSettings s) {
  if (!doc.is_object()) throw ProtocolError(source + ": expected a JSON object");
  static const std::set<std::string> kKnown = {
      "thresholds",      "aggregation",        "class_mode",
      "class_modes",     "score_fn",           "accuracy_reference",
      "coverage_policy", "methods",            "workers"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.contains(key)) {
      throw ProtocolError(source + ": unknown config key '" + key + "'");
    }
  }
  try {
    if (doc.contains("thresholds")) {
      s.config.thresholds = doc["thresholds"].get<std::vector<double>>();
    }
    if (doc.contains("aggregation")) {
      s.config.aggregation =
          parse_aggregation(doc["aggregation"].get<std::string>());
    }
    if (doc.contains("class_mode")) {
      const auto name = doc["class_mode"].get<std::string>();
      s.class_modes = name == "all"
                          ? std::vector{ClassMode::kPredicted, ClassMode::kTarget}
                          : std::vector{parse_class_mode(name)};
    }
    if (doc.contains("class_modes")) {
      s.class_modes.clear();
      for (const auto& name : doc["class_modes"].get<std::vector<std::string>>()) {
        s.class_modes.push_back(parse_class_mode(name));
      }
    }
    if (doc.contains("score_fn")) {
      s.config.score_fn = parse_score_fn(doc["score_fn"].get<std::string>());
    }
    if (doc.contains("accuracy_reference")) {
      const auto name = doc["accuracy_reference"].get<std::string>();
      s.config.accuracy_reference =
          name == "auto" ? std::nullopt
                         : std::optional(parse_accuracy_reference(name));
    }
    if (doc.contains("coverage_policy")) {
      s.config.coverage_policy =
          parse_coverage_policy(doc["coverage_policy"].get<std::string>());
    }
    if (doc.contains("methods")) {
      if (doc["methods"].is_null()) {
        s.methods.reset();
      } else {
        s.methods = doc["methods"].get<std::vector<std::string>>();
      }
    }
    if (doc.contains("workers")) {
      s.config.workers = doc["workers"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": malformed config: " + e.what());
  }
  s.config.validate();
  return s;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace

EvalSettings parse_settings(std::string_view json_text,
                            const std::string& source, EvalSettings base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": invalid JSON: " + e.what());
  }
  return settings_from(doc, source, std::move(base));
}

std::string serialize_settings(const EvalSettings& settings) {
  return settings_json(settings).dump(2) + "\n";
}

std::string format_fixed2(double value) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                       std::chars_format::fixed);
  if (ec != std::errc()) return shortest(value);
  std::string text(buf, ptr);

  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.erase(0, 1);
  }
  const std::size_t dot = text.find('.');
  std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  const bool round_up = frac.size() > 2 && frac[2] >= '5';
  frac.resize(2, '0');

  std::string digits = whole + frac;
  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
      if (i == 0) digits.insert(digits.begin(), '1');
    }
  }
  std::string out = digits.substr(0, digits.size() - 2) + "." +
                    digits.substr(digits.size() - 2);
  if (negative && out.find_first_not_of("0.") != std::string::npos) {
    out.insert(out.begin(), '-');
  }
  return out;
}

std::string report_to_csv(const MetricReport& report) {
  std::string out =
      "model_id,metric,class_mode,method_id,value,n_evaluated,n_skipped\n";
  for (const MetricResult& r : report.results) {
    out += csv_field(report.model_id) + "," + std::string(to_string(r.metric)) +
           "," + std::string(to_string(r.class_mode)) + "," +
           csv_field(r.method_id) + "," + format_fixed2(r.value) + "," +
           std::to_string(r.n_evaluated) + "," + std::to_string(r.n_skipped) +
           "\n";
  }
  return out;
}

std::string curves_to_csv(const MetricReport& report) {
  std::string out =
      "model_id,metric,class_mode,method_id,level,accuracy,samples\n";
  for (const MetricResult& r : report.results) {
    for (const LevelAccuracy& p : r.per_level) {
      out += csv_field(report.model_id) + "," +
             std::string(to_string(r.metric)) + "," +
             std::string(to_string(r.class_mode)) + "," +
             csv_field(r.method_id) + "," + shortest(p.level) + "," +
             format_fixed2(p.accuracy) + "," + std::to_string(p.samples) + "\n";
    }
  }
  return out;
}

std::string report_to_json(const MetricReport& report) {
  ordered_json doc;
  doc["model_id"] = report.model_id;
  doc["dataset_name"] = report.dataset_name;
  doc["config"] = settings_json(report.settings);
  ordered_json results = ordered_json::array();
  for (const MetricResult& r : report.results) {
    ordered_json e;
    e["metric"] = to_string(r.metric);
    e["method_id"] = r.method_id;
    e["class_mode"] = to_string(r.class_mode);
    e["value"] = r.value;
    e["n_evaluated"] = r.n_evaluated;
    e["n_skipped"] = r.n_skipped;
    ordered_json thresholds = ordered_json::array();
    for (const auto& [t, v] : r.per_threshold) {
      thresholds.push_back({{"t", t}, {"value", v}});
    }
    e["per_threshold"] = std::move(thresholds);
    ordered_json levels = ordered_json::array();
    for (const LevelAccuracy& p : r.per_level) {
      levels.push_back(
          {{"level", p.level}, {"accuracy", p.accuracy}, {"samples", p.samples}});
    }
    e["per_level"] = std::move(levels);
    e["clamped_images"] = r.clamped_images;
    results.push_back(std::move(e));
  }
  doc["results"] = std::move(results);
  return doc.dump(2) + "\n";
}

MetricReport report_from_json(std::string_view json_text,
                              const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": invalid JSON: " + e.what());
  }
  try {
    MetricReport report;
    report.model_id = doc.at("model_id").get<std::string>();
    report.dataset_name = doc.at("dataset_name").get<std::string>();
    report.settings = settings_from(doc.at("config"), source, EvalSettings{});
    for (const json& e : doc.at("results")) {
      MetricResult r;
      r.metric = parse_metric_id(e.at("metric").get<std::string>());
      r.method_id = e.at("method_id").get<std::string>();
      r.class_mode = parse_class_mode(e.at("class_mode").get<std::string>());
      r.value = e.at("value").get<double>();
      r.n_evaluated = e.at("n_evaluated").get<std::size_t>();
      r.n_skipped = e.at("n_skipped").get<std::size_t>();
      for (const json& t : e.at("per_threshold")) {
        r.per_threshold[t.at("t").get<double>()] = t.at("value").get<double>();
      }
      for (const json& p : e.at("per_level")) {
        r.per_level.push_back({p.at("level").get<double>(),
                               p.at("accuracy").get<double>(),
                               p.at("samples").get<std::size_t>()});
      }
      r.clamped_images = e.at("clamped_images").get<std::vector<std::string>>();
      report.results.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    throw ProtocolError(source + ": malformed report: " + e.what());
  }
}

std::string report_to_markdown(const MetricReport& report) {
  std::vector<std::string> methods;
  std::map<std::tuple<MetricId, ClassMode, std::string>, double> cells;
  std::set<std::pair<MetricId, ClassMode>> rows;
  for (const MetricResult& r : report.results) {
    if (std::find(methods.begin(), methods.end(), r.method_id) == methods.end()) {
      methods.push_back(r.method_id);
    }
    cells[{r.metric, r.class_mode, r.method_id}] = r.value;
    rows.insert({r.metric, r.class_mode});
  }

  std::ostringstream out;
  out << "## " << report.model_id << "\n\n| Metric | Class |";
  for (const std::string& m : methods) out << ' ' << m << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& [metric, mode] : rows) {
    out << "| " << to_string(metric) << " | " << to_string(mode) << " |";
    for (const std::string& m : methods) {
      const auto it = cells.find({metric, mode, m});
      out << ' ' << (it == cells.end() ? "-" : format_fixed2(it->second))
          << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string otdd_table_csv(const std::vector<OtddRow>& rows) {
  std::string out =
      "reference,dataset,otdd,epsilon,max_iter,tol,iterations,converged,"
      "features\n";
  for (const OtddRow& r : rows) {
    out += csv_field(r.reference) + "," + csv_field(r.dataset) + "," +
           shortest(r.result.distance) + "," + shortest(r.result.epsilon) + "," +
           std::to_string(r.max_iter) + "," + shortest(r.tol) + "," +
           std::to_string(r.result.iterations) + "," +
           (r.result.converged ? "true" : "false") + "," +
           csv_field(r.features) + "\n";
  }
  return out;
}

std::string otdd_table_markdown(const std::vector<OtddRow>& rows) {
  std::ostringstream out;
  out << "| Reference dataset | Dataset | OTDD |\n|---|---|---|\n";
  for (const OtddRow& r : rows) {
    out << "| " << r.reference << " | " << r.dataset << " | "
        << format_fixed2(r.result.distance)
        << (r.result.converged ? "" : " (unconverged)") << " |\n";
  }
  return out.str();
}

}  // namespace parteval
