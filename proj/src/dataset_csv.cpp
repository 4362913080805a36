#include "envkit/dataset_csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <vector>

#include "envkit/report.hpp"

namespace envkit {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const CsvDatasetOptions& opts) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "empty input");
  for (auto& h : header) h = trim(h);

  std::optional<std::size_t> response_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == opts.response) response_col = c;
  }
  if (!response_col) {
    throw Error(ErrorCode::ParseError, "response column '" + opts.response + "' not in header");
  }
  const std::size_t ncol = header.size();

  std::vector<std::vector<double>> columns(ncol);
  std::optional<std::size_t> text_col;
  std::vector<std::string> text_labels;  // first-seen order, at most two

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(line);
    } catch (const Error& e) {
      parse_fail(line_no, e.what());
    }
    if (fields.size() != ncol) {
      parse_fail(line_no, "expected " + std::to_string(ncol) + " fields, got " +
                              std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      const std::string f = trim(fields[c]);
      if (text_col != c) {
        if (auto v = to_double(f)) {
          columns[c].push_back(*v);
          continue;
        }
        if (f.empty()) parse_fail(line_no, "missing value in column '" + header[c] + "'");
        if (text_col || !columns[c].empty()) {
          parse_fail(line_no, "non-numeric value '" + f + "' in column '" + header[c] + "'");
        }
        text_col = c;
      }
      auto it = std::find(text_labels.begin(), text_labels.end(), f);
      if (it == text_labels.end()) {
        if (text_labels.size() == 2) {
          parse_fail(line_no, "column '" + header[c] + "' has more than two text labels");
        }
        text_labels.push_back(f);
        it = std::prev(text_labels.end());
      }
      columns[c].push_back(static_cast<double>(it - text_labels.begin()));
    }
  }

  const std::size_t n = columns[0].size();
  if (n == 0) throw Error(ErrorCode::ParseError, "no data rows");
  Dataset ds;
  ds.family = opts.family;
  ds.has_intercept = opts.intercept;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ncol - 1));
  ds.y.resize(static_cast<Eigen::Index>(n));
  Eigen::Index j = 0;
  for (std::size_t c = 0; c < ncol; ++c) {
    if (c == *response_col) {
      for (std::size_t i = 0; i < n; ++i) ds.y(static_cast<Eigen::Index>(i)) = columns[c][i];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) ds.X(static_cast<Eigen::Index>(i), j) = columns[c][i];
    ds.predictor_names.push_back(header[c]);
    ++j;
  }
  ds.validate();
  return ds;
}

Dataset read_dataset_csv_file(const std::string& path, const CsvDatasetOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return read_dataset_csv(in, opts);
}

}  // namespace envkit
