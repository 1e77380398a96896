#include "pv5cli/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>

#include "pv5/errors.hpp"

namespace pv5::cli {

namespace {

Json number_or_null(const std::optional<Real>& x) {
  return x ? Json(x->to_string()) : Json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

const std::regex& decimal_pattern() {
  static const std::regex re(
      R"(^(-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?|nan|-?inf)$)");
  return re;
}

}  // namespace

Summary summarize(const std::vector<IdentityReport>& checks) {
  Summary s;
  struct Acc {
    std::optional<Real> max_residual;
    int count = 0, skipped = 0, errors = 0;
  };
  std::map<IdentityId, Acc> diag;
  for (const auto& c : checks) {
    if (c.tier == Tier::Required) {
      if (c.status == CheckStatus::Skipped) continue;
      if (!c.pass.value_or(false)) s.required_pass = false;
      if (c.status == CheckStatus::Ok) {
        if (!s.max_required_residual || c.residual > *s.max_required_residual) {
          s.max_required_residual = c.residual;
        }
      }
      continue;
    }
    Acc& a = diag[c.id];
    ++a.count;
    if (c.status == CheckStatus::Skipped) {
      ++a.skipped;
    } else if (c.status == CheckStatus::Error) {
      ++a.errors;
    } else if (!a.max_residual || c.residual > *a.max_residual) {
      a.max_residual = c.residual;
    }
  }
  for (const auto& [id, a] : diag) {
    Json entry = Json::object();
    entry["max_residual"] = number_or_null(a.max_residual);
    entry["count"] = a.count;
    entry["skipped"] = a.skipped;
    entry["errors"] = a.errors;
    s.diagnostics[std::string(to_string(id))] = std::move(entry);
  }
  return s;
}

Json check_to_json(const IdentityReport& r) {
  Json j = Json::object();
  j["id"] = std::string(to_string(r.id));
  j["tier"] = std::string(to_string(r.tier));
  j["n"] = r.n;
  j["t"] = r.t.to_string();
  j["z"] = number_or_null(r.z);
  j["residual"] = r.residual.to_string();
  j["residual_half_step"] = number_or_null(r.residual_half_step);
  j["pass"] = r.pass ? Json(*r.pass) : Json(nullptr);
  j["status"] = std::string(to_string(r.status));
  j["message"] = r.message;
  return j;
}

Json make_report(std::string_view command, const Json& params,
                 const std::vector<IdentityReport>& checks,
                 const Summary& summary, const Table& results,
                 const std::string& timestamp) {
  Json doc = Json::object();
  doc["schema"] = std::string(kSchema);
  doc["timestamp"] = timestamp;
  doc["command"] = std::string(command);
  doc["params"] = params;
  Json list = Json::array();
  for (const auto& c : checks) list.push_back(check_to_json(c));
  doc["checks"] = std::move(list);
  Json sum = Json::object();
  sum["required_pass"] = summary.required_pass;
  sum["max_required_residual"] = number_or_null(summary.max_required_residual);
  sum["diagnostics"] = summary.diagnostics;
  doc["summary"] = std::move(sum);
  Json table = Json::object();
  table["columns"] = results.columns;
  table["rows"] = results.rows;
  doc["results"] = std::move(table);
  return doc;
}

void emit_report(const Json& report, const std::filesystem::path& path) {
  const std::string text = report.dump(2) + "\n";
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "cannot write stdout");
    return;
  }
  std::ofstream out = open_out(path);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

Json load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::IoError,
                "cannot parse " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> validate_report(const Json& doc) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(msg); };
  if (!doc.is_object()) {
    fail("report is not an object");
    return errors;
  }
  auto exact_keys = [&](const Json& obj, const std::set<std::string>& keys,
                        const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
      if (!keys.count(k)) fail(where + ": unknown field '" + k + "'");
    }
    for (const auto& k : keys) {
      if (!obj.contains(k)) fail(where + ": missing field '" + k + "'");
    }
  };
  auto is_decimal = [](const Json& v) {
    return v.is_string() &&
           std::regex_match(v.get<std::string>(), decimal_pattern());
  };
  exact_keys(doc,
             {"schema", "timestamp", "command", "params", "checks", "summary",
              "results"},
             "report");
  if (!errors.empty()) return errors;
  if (doc["schema"] != std::string(kSchema)) fail("schema is not pv5-jacobi-lab/1");
  if (!doc["timestamp"].is_string()) fail("timestamp is not a string");
  if (!doc["command"].is_string()) fail("command is not a string");
  if (!doc["params"].is_object()) fail("params is not an object");
  if (!doc["checks"].is_array()) {
    fail("checks is not an array");
  } else {
    std::size_t i = 0;
    for (const auto& c : doc["checks"]) {
      const std::string where = "checks[" + std::to_string(i++) + "]";
      if (!c.is_object()) {
        fail(where + " is not an object");
        continue;
      }
      const std::size_t before = errors.size();
      exact_keys(c,
                 {"id", "tier", "n", "t", "z", "residual",
                  "residual_half_step", "pass", "status", "message"},
                 where);
      if (errors.size() != before) continue;
      if (!c["id"].is_string() ||
          !parse_identity(c["id"].get<std::string>())) {
        fail(where + ".id is not a registered identity");
      }
      const Json& tier = c["tier"];
      const bool required = tier == "REQUIRED";
      if (!required && tier != "DIAGNOSTIC") fail(where + ".tier is invalid");
      if (!c["n"].is_number_integer()) fail(where + ".n is not an integer");
      if (!is_decimal(c["t"])) fail(where + ".t is not a decimal string");
      if (!c["z"].is_null() && !is_decimal(c["z"])) {
        fail(where + ".z is not a decimal string or null");
      }
      if (!is_decimal(c["residual"])) {
        fail(where + ".residual is not a decimal string");
      }
      if (!c["residual_half_step"].is_null() &&
          !is_decimal(c["residual_half_step"])) {
        fail(where + ".residual_half_step is not a decimal string or null");
      }
      const Json& status = c["status"];
      if (status != "OK" && status != "SKIPPED" && status != "ERROR") {
        fail(where + ".status is invalid");
      }
      if (!c["pass"].is_null() && !c["pass"].is_boolean()) {
        fail(where + ".pass is not boolean or null");
      }
      if (!required && !c["pass"].is_null()) {
        fail(where + ".pass must be null for DIAGNOSTIC checks");
      }
      if (!c["message"].is_string()) fail(where + ".message is not a string");
    }
  }
  const Json& sum = doc["summary"];
  if (!sum.is_object()) {
    fail("summary is not an object");
  } else {
    exact_keys(sum, {"required_pass", "max_required_residual", "diagnostics"},
               "summary");
    if (sum.contains("required_pass") && !sum["required_pass"].is_boolean()) {
      fail("summary.required_pass is not boolean");
    }
    if (sum.contains("max_required_residual") &&
        !sum["max_required_residual"].is_null() &&
        !is_decimal(sum["max_required_residual"])) {
      fail("summary.max_required_residual is not a decimal string or null");
    }
    if (sum.contains("diagnostics") && !sum["diagnostics"].is_object()) {
      fail("summary.diagnostics is not an object");
    }
  }
  const Json& res = doc["results"];
  if (!res.is_object()) {
    fail("results is not an object");
  } else {
    exact_keys(res, {"columns", "rows"}, "results");
    if (res.contains("columns") && res.contains("rows")) {
      const std::size_t width = res["columns"].size();
      for (const auto& row : res["rows"]) {
        if (!row.is_array() || row.size() != width) {
          fail("results row width differs from columns");
          break;
        }
      }
    }
  }
  return errors;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_field(table.columns[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << csv_field(row[i]);
    }
    out << "\n";
  }
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pv5::cli
