#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fuselect/types.hpp"

namespace fuselect {

namespace detail {

using ojson = nlohmann::ordered_json;

// JSON has no infinities; the never-trigger sentinel is written as strings.
inline ojson threshold_value(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double threshold_value(const ojson& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw SchemaError("artifact field " + where + " is not a number");
}

template <typename T>
T required(const ojson& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError("artifact is missing field " + where + "." + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("artifact field " + where + "." + key + " has the wrong type");
  }
}

}  // namespace detail

/// Deterministic JSON text for a validated artifact. Key order is fixed.
inline std::string write_calibration(const CalibrationArtifact& a) {
  validate(a);
  detail::ojson j;
  detail::ojson th = detail::ojson::object();
  for (Emotion c : kEmotions) {
    const auto& t = a.thresholds.at(c);
    detail::ojson e;
    e["tau_e"] = detail::threshold_value(t.tau_e);
    e["tau_v"] = detail::threshold_value(t.tau_v);
    e["tau_m"] = t.tau_m;
    th[std::string(name(c))] = std::move(e);
  }
  j["thresholds"] = std::move(th);
  j["f_m"] = std::string(name(a.f_m));
  j["f_i"] = a.f_i;
  detail::ojson ex = detail::ojson::array();
  for (Transition t : a.exclusion) ex.push_back(transition_name(t));
  j["exclusion"] = std::move(ex);
  detail::ojson meta;
  meta["percentile_method"] = a.meta.percentile_method;
  meta["delta_percentile"] = a.meta.delta_percentile;
  meta["step_percentile"] = a.meta.step_percentile;
  meta["tau_m_step"] = a.meta.tau_m_step;
  meta["log_base"] = a.meta.log_base;
  meta["created_from_fold"] = a.meta.created_from_fold;
  j["meta"] = std::move(meta);
  return j.dump(2) + "\n";
}

inline void write_calibration(std::ostream& out, const CalibrationArtifact& a) {
  out << write_calibration(a);
}

inline CalibrationArtifact parse_calibration(std::istream& in) {
  detail::ojson j;
  try {
    j = detail::ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("artifact is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("artifact must be a JSON object");

  CalibrationArtifact a;
  if (!j.contains("thresholds") || !j["thresholds"].is_object())
    throw SchemaError("artifact is missing object 'thresholds'");
  for (Emotion c : kEmotions) {
    const std::string cls(name(c));
    const auto& th = j["thresholds"];
    if (!th.contains(cls)) throw ValidationError("artifact has no thresholds for class " + cls);
    const auto& e = th[cls];
    for (const char* key : {"tau_e", "tau_v", "tau_m"})
      if (!e.is_object() || !e.contains(key))
        throw SchemaError("artifact is missing field thresholds." + cls + "." + key);
    ClassThresholds t;
    t.tau_e = detail::threshold_value(e["tau_e"], "thresholds." + cls + ".tau_e");
    t.tau_v = detail::threshold_value(e["tau_v"], "thresholds." + cls + ".tau_v");
    t.tau_m = detail::threshold_value(e["tau_m"], "thresholds." + cls + ".tau_m");
    a.thresholds[c] = t;
  }

  auto fm = detail::required<std::string>(j, "f_m", "artifact");
  auto strategy = parse_strategy(fm);
  if (!strategy) throw SchemaError("artifact f_m must be \"refer\" or \"simple\", got \"" + fm + "\"");
  a.f_m = *strategy;
  a.f_i = detail::required<bool>(j, "f_i", "artifact");

  if (!j.contains("exclusion") || !j["exclusion"].is_array())
    throw SchemaError("artifact is missing array 'exclusion'");
  for (const auto& item : j["exclusion"]) {
    if (!item.is_string()) throw SchemaError("exclusion entries must be strings");
    auto t = parse_transition(item.get<std::string>());
    if (!t) throw SchemaError("bad exclusion entry \"" + item.get<std::string>() + "\"");
    a.exclusion.insert(*t);
  }

  if (!j.contains("meta")) throw SchemaError("artifact is missing object 'meta'");
  const auto& m = j["meta"];
  a.meta.percentile_method = detail::required<std::string>(m, "percentile_method", "meta");
  a.meta.delta_percentile = detail::required<int>(m, "delta_percentile", "meta");
  a.meta.step_percentile = detail::required<int>(m, "step_percentile", "meta");
  a.meta.tau_m_step = detail::required<double>(m, "tau_m_step", "meta");
  a.meta.log_base = detail::required<std::string>(m, "log_base", "meta");
  a.meta.created_from_fold = detail::required<int>(m, "created_from_fold", "meta");

  validate(a);
  return a;
}

inline CalibrationArtifact parse_calibration(const std::string& text) {
  std::istringstream in(text);
  return parse_calibration(in);
}

inline CalibrationArtifact read_calibration_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open artifact '" + path + "'");
  return parse_calibration(in);
}

}  // namespace fuselect
