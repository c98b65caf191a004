#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catnet {

// One bond's raw fields. Fractions are plain ratios (0.0758, not 7.58%).
struct ContractRecord {
  std::string contract_id;
  int issue_year = 0;
  int issue_month = 1;
  double issue_amount_musd = 0.0;
  double spread_premium = 0.0;  // prediction target
  double expected_loss = 0.0;
  double prob_first_loss = 0.0;
  double prob_exhaust = 0.0;
  double conditional_expected_loss = 0.0;
  std::string sp_rating;  // may be empty
  std::vector<std::string> trigger_types;
  std::string risk_modeler;  // may be empty
  std::vector<std::string> perils;
  std::vector<std::string> countries;
  std::vector<std::string> states_provinces;  // may be empty
  std::string cedent;
  std::vector<std::string> underwriters;
  double exposure_term_months = 0.0;

  friend bool operator==(const ContractRecord&, const ContractRecord&) = default;
};

inline constexpr std::array<std::string_view, 18> kContractColumns{
    "contract_id",     "issue_year",     "issue_month",   "issue_amount_musd",
    "spread_premium",  "expected_loss",  "prob_first_loss", "prob_exhaust",
    "conditional_expected_loss", "sp_rating", "trigger_types", "risk_modeler",
    "perils",          "countries",      "states_provinces", "cedent",
    "underwriters",    "exposure_term_months"};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string column;
  std::string message;
};

struct ParseResult {
  std::vector<ContractRecord> records;
  std::vector<RowError> errors;
};

// Header must name every column in kContractColumns (any order; extra columns
// ignored). A missing column throws DataError naming it. Bad rows are skipped
// and collected in `errors`; parsing continues.
ParseResult parse_csv(std::istream& in);
ParseResult parse_csv_file(const std::filesystem::path& path);

// Canonical CSV: header in kContractColumns order, lists joined with ';',
// numbers in shortest round-trip form.
void write_csv(std::ostream& out, std::span<const ContractRecord> records);
std::string to_csv(std::span<const ContractRecord> records);

// Checks field invariants; returns a message for the first violation, empty if valid.
std::string validate(const ContractRecord& record);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace catnet
