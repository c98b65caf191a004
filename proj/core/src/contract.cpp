#include "catnet/contract.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "catnet/error.hpp"

namespace catnet {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// RFC 4180 record reader; returns false at end of input. Quoted fields may
// span lines, which advances `line`.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t end = cell.find(';', start);
    if (end == std::string_view::npos) end = cell.size();
    std::string item = trim(cell.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

struct CellError {
  std::string column;
  std::string message;
};

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    out += items[i];
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, ptr);
}

std::string validate(const ContractRecord& r) {
  if (r.contract_id.empty()) return "empty contract_id";
  if (r.issue_month < 1 || r.issue_month > 12) return "issue_month outside 1-12";
  const std::pair<const char*, double> fractions[] = {
      {"spread_premium", r.spread_premium},
      {"expected_loss", r.expected_loss},
      {"prob_first_loss", r.prob_first_loss},
      {"prob_exhaust", r.prob_exhaust},
      {"conditional_expected_loss", r.conditional_expected_loss}};
  for (auto [name, value] : fractions) {
    if (!(value >= 0.0)) return std::string(name) + " must be >= 0";
  }
  if (!(r.issue_amount_musd >= 0.0)) return "issue_amount_musd must be >= 0";
  if (!(r.exposure_term_months >= 0.0)) return "exposure_term_months must be >= 0";
  if (r.cedent.empty()) return "cedent is empty";
  if (r.perils.empty()) return "perils is empty";
  if (r.countries.empty()) return "countries is empty";
  if (r.underwriters.empty()) return "underwriters is empty";
  if (r.trigger_types.empty()) return "trigger_types is empty";
  return {};
}

ParseResult parse_csv(std::istream& in) {
  ParseResult result;
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_record(in, fields, line)) throw DataError("csv: empty input, header row required");
  line = 1;

  std::map<std::string, std::size_t, std::less<>> header;
  for (std::size_t i = 0; i < fields.size(); ++i) header.emplace(trim(fields[i]), i);
  std::array<std::size_t, kContractColumns.size()> col{};
  for (std::size_t i = 0; i < kContractColumns.size(); ++i) {
    auto it = header.find(kContractColumns[i]);
    if (it == header.end()) {
      throw DataError("csv: missing required column '" + std::string(kContractColumns[i]) + "'");
    }
    col[i] = it->second;
  }

  std::size_t next_line = 1;
  while (true) {
    const std::size_t row_line = next_line + 1;
    std::size_t consumed = 0;
    if (!read_record(in, fields, consumed)) break;
    next_line += std::max<std::size_t>(consumed, 1);
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line

    std::optional<CellError> error;
    auto cell = [&](std::size_t i) -> std::string_view {
      const std::size_t idx = col[i];
      return idx < fields.size() ? std::string_view(fields[idx]) : std::string_view();
    };
    auto number = [&](std::size_t i) -> double {
      auto v = parse_number(cell(i));
      if (!v && !error) {
        error = CellError{std::string(kContractColumns[i]),
                          "not a number: '" + std::string(cell(i)) + "'"};
      }
      return v.value_or(0.0);
    };

    ContractRecord r;
    r.contract_id = trim(cell(0));
    const double year = number(1);
    const double month = number(2);
    r.issue_year = static_cast<int>(year);
    r.issue_month = static_cast<int>(month);
    if (!error && (year != r.issue_year || month != r.issue_month)) {
      error = CellError{"issue_year", "year and month must be integers"};
    }
    r.issue_amount_musd = number(3);
    r.spread_premium = number(4);
    r.expected_loss = number(5);
    r.prob_first_loss = number(6);
    r.prob_exhaust = number(7);
    r.conditional_expected_loss = number(8);
    r.sp_rating = trim(cell(9));
    r.trigger_types = split_list(cell(10));
    r.risk_modeler = trim(cell(11));
    r.perils = split_list(cell(12));
    r.countries = split_list(cell(13));
    r.states_provinces = split_list(cell(14));
    r.cedent = trim(cell(15));
    r.underwriters = split_list(cell(16));
    r.exposure_term_months = number(17);

    if (!error) {
      if (auto msg = validate(r); !msg.empty()) error = CellError{"", msg};
    }
    if (error) {
      result.errors.push_back(RowError{row_line, error->column, error->message});
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

ParseResult parse_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(std::ostream& out, std::span<const ContractRecord> records) {
  for (std::size_t i = 0; i < kContractColumns.size(); ++i) {
    if (i) out << ',';
    out << kContractColumns[i];
  }
  out << '\n';
  for (const auto& r : records) {
    const std::string cells[] = {
        csv_escape(r.contract_id),
        std::to_string(r.issue_year),
        std::to_string(r.issue_month),
        format_double(r.issue_amount_musd),
        format_double(r.spread_premium),
        format_double(r.expected_loss),
        format_double(r.prob_first_loss),
        format_double(r.prob_exhaust),
        format_double(r.conditional_expected_loss),
        csv_escape(r.sp_rating),
        csv_escape(join_list(r.trigger_types)),
        csv_escape(r.risk_modeler),
        csv_escape(join_list(r.perils)),
        csv_escape(join_list(r.countries)),
        csv_escape(join_list(r.states_provinces)),
        csv_escape(r.cedent),
        csv_escape(join_list(r.underwriters)),
        format_double(r.exposure_term_months),
    };
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
}

std::string to_csv(std::span<const ContractRecord> records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace catnet
