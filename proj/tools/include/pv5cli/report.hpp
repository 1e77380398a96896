#pragma once

// JSON reports and CSV tables.
//
// Every number above native double precision is written as a decimal string
// carrying enough digits to round-trip at the working precision. Keys are
// emitted in a fixed order so that identical runs produce identical bytes
// apart from "timestamp".

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pv5/verify.hpp"

namespace pv5::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "pv5-jacobi-lab/1";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Summary {
  bool required_pass = true;
  std::optional<Real> max_required_residual;
  Json diagnostics = Json::object();
};

// required_pass, max_required_residual, and per-id diagnostic maxima.
Summary summarize(const std::vector<IdentityReport>& checks);

Json check_to_json(const IdentityReport& r);
Json make_report(std::string_view command, const Json& params,
                 const std::vector<IdentityReport>& checks,
                 const Summary& summary, const Table& results,
                 const std::string& timestamp);

// "-" writes to standard output. IoError on failure.
void emit_report(const Json& report, const std::filesystem::path& path);
Json load_report(const std::filesystem::path& path);

// Empty when the document conforms to the schema; otherwise one message per
// violation.
std::vector<std::string> validate_report(const Json& report);

void write_csv(const Table& table, const std::filesystem::path& path);

// UTC, ISO 8601, seconds resolution.
std::string utc_timestamp();

}  // namespace pv5::cli
