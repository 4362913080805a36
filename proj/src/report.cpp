#include "envkit/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <algorithm>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "envkit/error.hpp"

namespace envkit {

void ReportTable::add_row(std::string label, std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::DimensionError, "table '" + name + "' row has " +
                                               std::to_string(row.size()) + " values for " +
                                               std::to_string(columns.size()) + " columns");
  }
  row_labels.push_back(std::move(label));
  values.push_back(std::move(row));
}

const ReportTable* Report::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const MetaValue* Report::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = r.command;
  auto& meta = j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.meta) {
    if (const double* d = std::get_if<double>(&v)) {
      meta[k] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
    } else {
      meta[k] = std::get<std::string>(v);
    }
  }
  auto& tables = j["tables"] = nlohmann::ordered_json::object();
  for (const auto& t : r.tables) {
    nlohmann::ordered_json jt;
    jt["columns"] = t.columns;
    jt["rows"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      nlohmann::ordered_json row;
      row["label"] = t.row_labels[i];
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        const double v = t.values[i][c];
        row[t.columns[c]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
      }
      jt["rows"].push_back(std::move(row));
    }
    tables[t.name] = std::move(jt);
  }
  return j.dump(2) + "\n";
}

std::string csv_escape(std::string_view field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
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
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "table,row,column,value\n";
  os << "meta,,schema," << kReportSchema << "\n";
  os << "meta,,command," << csv_escape(r.command) << "\n";
  for (const auto& [k, v] : r.meta) {
    os << "meta,," << csv_escape(k) << ",";
    if (const double* d = std::get_if<double>(&v)) {
      os << format_number(*d);
    } else {
      // Text values are always quoted so they never re-parse as numbers.
      std::string s = "\"";
      for (char c : std::get<std::string>(v)) {
        if (c == '"') s += '"';
        s += c;
      }
      os << s << '"';
    }
    os << "\n";
  }
  for (const auto& t : r.tables) {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        os << csv_escape(t.name) << ',' << csv_escape(t.row_labels[i]) << ','
           << csv_escape(t.columns[c]) << ',' << format_number(t.values[i][c]) << "\n";
      }
    }
  }
  return os.str();
}

namespace {

double parse_number(const std::string& s, std::size_t line_no) {
  if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + s +
                                           "' is not a number");
  }
  return v;
}

bool raw_field_is_quoted(std::string_view line) {
  // The value is the last field; it is quoted iff the line ends with a quote.
  while (!line.empty() && (line.back() == '\r')) line.remove_suffix(1);
  return !line.empty() && line.back() == '"';
}

}  // namespace

Report parse_report_csv(std::string_view text) {
  struct Cell {
    std::string row, column;
    double value;
    std::size_t line;
  };
  Report r;
  std::vector<std::pair<std::string, std::vector<Cell>>> cells;  // per table, in file order
  std::size_t line_no = 0;
  bool schema_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": expected 4 fields, got " + std::to_string(f.size()));
    }
    if (line_no == 1) {
      if (f[0] != "table" || f[1] != "row" || f[2] != "column" || f[3] != "value") {
        throw Error(ErrorCode::ParseError, "line 1: unexpected header");
      }
      continue;
    }
    if (f[0] == "meta") {
      if (f[2] == "schema") {
        if (f[3] != kReportSchema) throw Error(ErrorCode::ParseError, "unsupported schema '" + f[3] + "'");
        schema_seen = true;
      } else if (f[2] == "command") {
        r.command = f[3];
      } else if (raw_field_is_quoted(line)) {
        r.meta.emplace_back(f[2], f[3]);
      } else {
        r.meta.emplace_back(f[2], parse_number(f[3], line_no));
      }
      continue;
    }
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& e) { return e.first == f[0]; });
    if (it == cells.end()) {
      cells.emplace_back(f[0], std::vector<Cell>{});
      it = std::prev(cells.end());
    }
    it->second.push_back(Cell{f[1], f[2], parse_number(f[3], line_no), line_no});
  }
  if (!schema_seen) throw Error(ErrorCode::ParseError, "missing schema entry");

  for (const auto& [name, recs] : cells) {
    ReportTable t{name, {}, {}, {}};
    for (const Cell& c : recs) {
      if (std::find(t.columns.begin(), t.columns.end(), c.column) == t.columns.end()) {
        t.columns.push_back(c.column);
      }
    }
    const std::size_t m = t.columns.size();
    if (recs.size() % m != 0) {
      throw Error(ErrorCode::ParseError, "table '" + name + "' has an incomplete row");
    }
    for (std::size_t start = 0; start < recs.size(); start += m) {
      std::vector<double> row;
      for (std::size_t c = 0; c < m; ++c) {
        const Cell& cell = recs[start + c];
        if (cell.column != t.columns[c] || cell.row != recs[start].row) {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(cell.line) +
                                                 ": cell out of order in table '" + name + "'");
        }
        row.push_back(cell.value);
      }
      t.row_labels.push_back(recs[start].row);
      t.values.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

}  // namespace envkit
