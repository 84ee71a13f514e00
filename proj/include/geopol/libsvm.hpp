#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geopol/engine.hpp"

namespace geopol {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct SparseRow {
  double label = 0.0;
  /// (1-based index, value), strictly increasing in index.
  std::vector<std::pair<std::size_t, double>> features;

  /// sum_j a_j x_{j-1}, in index order.
  double dot(const Vector& x) const;
};

struct SparseDataset {
  std::vector<SparseRow> rows;
  std::size_t dim = 0;
  /// Original labels that were mapped to +1 / -1.
  std::vector<std::pair<double, double>> label_mapping;
  std::vector<std::string> warnings;
};

/// Reads "label idx:val idx:val ..." lines. Blank lines and '#' comments are
/// skipped; labels are normalized to +1 (positive) / -1 (otherwise).
SparseDataset parse_libsvm(std::istream& in);
SparseDataset parse_libsvm_string(const std::string& text);

/// Writes the dataset back with round-trip precision.
void serialize_libsvm(const SparseDataset& data, std::ostream& out);
std::string serialize_libsvm_string(const SparseDataset& data);

}  // namespace geopol
