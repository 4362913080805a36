#pragma once

// Command reports and their JSON / CSV encodings.
//
// JSON layout ("schema": "envelope-report/1"):
//   { "schema", "command", "meta": {key: string|number},
//     "tables": { name: { "columns": [...],
//                         "rows": [ {"label": ..., column: number|null, ...} ] } } }
//
// CSV layout is long format with header `table,row,column,value`; meta
// entries use table "meta" and an empty row. Non-finite numbers are written
// as null (JSON) or NA (CSV). Numbers use shortest round-trip formatting.

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace envkit {

inline constexpr std::string_view kReportSchema = "envelope-report/1";

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> values;  // values[row][column]

  void add_row(std::string label, std::vector<double> row);
};

using MetaValue = std::variant<double, std::string>;

struct Report {
  std::string command;
  std::vector<std::pair<std::string, MetaValue>> meta;
  std::vector<ReportTable> tables;

  const ReportTable* table(std::string_view name) const;
  const MetaValue* meta_value(std::string_view key) const;
};

std::string to_json(const Report& r);
std::string to_csv(const Report& r);

/// Parses the CSV encoding back into a Report. Throws ParseError.
Report parse_report_csv(std::string_view text);

/// Shortest decimal text that parses back to the same double; "NA" for
/// non-finite values.
std::string format_number(double v);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string csv_escape(std::string_view field);

}  // namespace envkit
