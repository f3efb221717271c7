// Report serialization: one JSON object per report (streamable, one per
// line) and a CSV flattening with one row per grid point. Both formats
// round-trip: parse . serialize is the identity on the serialized bytes.
#pragma once

#include <json.hpp>

#include <optional>
#include <sstream>

#include "qturan/verify.hpp"

namespace qturan {

inline const char* outcome_kind_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Verified: return "verified";
    case OutcomeKind::ViolatedAt: return "violated";
    case OutcomeKind::Inconclusive: return "inconclusive";
  }
  throw DomainError("unknown outcome kind");
}

inline OutcomeKind outcome_kind_from_name(const std::string& s) {
  if (s == "verified") return OutcomeKind::Verified;
  if (s == "violated") return OutcomeKind::ViolatedAt;
  if (s == "inconclusive") return OutcomeKind::Inconclusive;
  throw DomainError("unknown outcome kind: '" + s + "'");
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& r,
                                             std::optional<long> wall_time_ms = std::nullopt) {
  nlohmann::ordered_json j;
  j["target"] = target_name(r.target);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["grid"] = r.grid;
  nlohmann::ordered_json outcome;
  outcome["kind"] = outcome_kind_name(r.outcome.kind);
  if (!r.outcome.at.empty()) outcome["at"] = r.outcome.at;
  if (!r.outcome.reason.empty()) outcome["reason"] = r.outcome.reason;
  j["outcome"] = outcome;
  j["margin"] = r.margin;
  j["tolerances"] = {{"tol", r.tol}, {"eps", r.eps}, {"precision_bits", r.precision_bits}};
  j["terms_used_max"] = r.terms_used_max;
  if (wall_time_ms) j["wall_time_ms"] = *wall_time_ms;
  return j;
}

inline std::string report_to_json_line(const VerificationReport& r,
                                       std::optional<long> wall_time_ms = std::nullopt) {
  return report_to_json(r, wall_time_ms).dump();
}

inline VerificationReport report_from_json(const nlohmann::ordered_json& j,
                                           std::optional<long>* wall_time_ms = nullptr) {
  VerificationReport r;
  r.target = target_from_name(j.at("target").get<std::string>());
  for (const auto& [k, v] : j.at("params").items())
    r.params.emplace_back(k, v.get<std::string>());
  for (const auto& x : j.at("grid")) r.grid.push_back(x.get<std::string>());
  const auto& o = j.at("outcome");
  r.outcome.kind = outcome_kind_from_name(o.at("kind").get<std::string>());
  if (o.contains("at")) r.outcome.at = o.at("at").get<std::string>();
  if (o.contains("reason")) r.outcome.reason = o.at("reason").get<std::string>();
  r.margin = j.at("margin").get<std::string>();
  const auto& t = j.at("tolerances");
  r.tol = t.at("tol").get<std::string>();
  r.eps = t.at("eps").get<std::string>();
  r.precision_bits = t.at("precision_bits").get<unsigned>();
  r.terms_used_max = j.at("terms_used_max").get<long>();
  if (wall_time_ms)
    *wall_time_ms = j.contains("wall_time_ms")
                        ? std::optional<long>(j.at("wall_time_ms").get<long>())
                        : std::nullopt;
  return r;
}

inline VerificationReport report_from_json_line(const std::string& line,
                                                std::optional<long>* wall_time_ms = nullptr) {
  return report_from_json(nlohmann::ordered_json::parse(line), wall_time_ms);
}

// --------------------------------------------------------------------------
// CSV
// --------------------------------------------------------------------------

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "target", "q", "a", "b", "c", "n", "mode", "x", "outcome", "at", "reason",
      "margin", "tol", "eps", "precision_bits", "terms_used_max", "wall_time_ms"};
  return cols;
}

inline std::string param_lookup(const ParamList& params, const std::string& key) {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return "";
}

}  // namespace detail

inline std::string reports_to_csv(
    const std::vector<VerificationReport>& reports,
    const std::vector<std::optional<long>>& wall_times = {}) {
  std::ostringstream out;
  const auto& cols = detail::csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (size_t ri = 0; ri < reports.size(); ++ri) {
    const VerificationReport& r = reports[ri];
    const std::optional<long> wall = ri < wall_times.size() ? wall_times[ri] : std::nullopt;
    std::vector<std::string> xs = r.grid;
    if (xs.empty()) xs.push_back("");
    for (const std::string& x : xs) {
      std::vector<std::string> row = {
          target_name(r.target),
          detail::param_lookup(r.params, "q"),
          detail::param_lookup(r.params, "a"),
          detail::param_lookup(r.params, "b"),
          detail::param_lookup(r.params, "c"),
          detail::param_lookup(r.params, "n"),
          detail::param_lookup(r.params, "mode"),
          x,
          outcome_kind_name(r.outcome.kind),
          r.outcome.at,
          r.outcome.reason,
          r.margin,
          r.tol,
          r.eps,
          std::to_string(r.precision_bits),
          std::to_string(r.terms_used_max),
          wall ? std::to_string(*wall) : ""};
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_escape(row[i]);
      out << "\n";
    }
  }
  return out.str();
}

inline std::vector<VerificationReport> reports_from_csv(
    const std::string& csv, std::vector<std::optional<long>>* wall_times = nullptr) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty CSV report");
  std::vector<VerificationReport> out;
  std::vector<std::string> signature;  // row fields minus x, to group grid rows
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != detail::csv_columns().size())
      throw DomainError("CSV row has wrong column count");
    std::vector<std::string> sig;
    for (size_t i = 0; i < f.size(); ++i)
      if (detail::csv_columns()[i] != "x") sig.push_back(f[i]);
    if (!out.empty() && sig == signature) {
      if (!f[7].empty()) out.back().grid.push_back(f[7]);
      continue;
    }
    signature = sig;
    VerificationReport r;
    r.target = target_from_name(f[0]);
    const char* keys[] = {"q", "a", "b", "c", "n", "mode"};
    for (size_t i = 0; i < 6; ++i)
      if (!f[i + 1].empty()) r.params.emplace_back(keys[i], f[i + 1]);
    if (!f[7].empty()) r.grid.push_back(f[7]);
    r.outcome.kind = outcome_kind_from_name(f[8]);
    r.outcome.at = f[9];
    r.outcome.reason = f[10];
    r.margin = f[11];
    r.tol = f[12];
    r.eps = f[13];
    r.precision_bits = static_cast<unsigned>(std::stoul(f[14]));
    r.terms_used_max = std::stol(f[15]);
    out.push_back(std::move(r));
    if (wall_times)
      wall_times->push_back(f[16].empty() ? std::optional<long>() : std::optional<long>(std::stol(f[16])));
  }
  return out;
}

}  // namespace qturan
