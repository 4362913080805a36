#pragma once

// Comma-separated input with a header row. The response column is named by
// the caller; every other column is a predictor, in file order. Values must
// be numeric, except for at most one column holding exactly two distinct text
// labels, which is encoded 0/1 in first-seen order.

#include <istream>
#include <string>

#include "envkit/glm.hpp"

namespace envkit {

struct CsvDatasetOptions {
  std::string response;
  Family family = Family::Linear;
  bool intercept = false;
};

/// Throws ParseError naming the 1-based line, FamilyMismatch or DimensionError.
Dataset read_dataset_csv(std::istream& in, const CsvDatasetOptions& opts);
Dataset read_dataset_csv_file(const std::string& path, const CsvDatasetOptions& opts);

}  // namespace envkit
