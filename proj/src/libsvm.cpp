#include "geopol/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace geopol {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void append_double(std::string& buf, double v) {
  char tmp[32];
  const auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf.append(tmp, ptr);
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            message),
      line_(line),
      column_(column) {}

double SparseRow::dot(const Vector& x) const {
  double s = 0.0;
  for (const auto& [j, v] : features) s += v * x[static_cast<Eigen::Index>(j - 1)];
  return s;
}

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset data;
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    std::string_view line(text);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    // Tokens with their 1-based start column.
    std::vector<std::pair<std::string_view, std::size_t>> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && !is_space(line[i])) ++i;
      tokens.emplace_back(line.substr(start, i - start), start + 1);
    }
    if (tokens.empty()) continue;

    SparseRow row;
    double label = 0.0;
    if (!parse_double(tokens[0].first, label))
      throw ParseError("malformed label '" + std::string(tokens[0].first) + "'", lineno,
                       tokens[0].second);
    row.label = label > 0.0 ? 1.0 : -1.0;
    if (label != 1.0 && label != -1.0) {
      bool seen = false;
      for (const auto& [orig, mapped] : data.label_mapping) seen = seen || orig == label;
      if (!seen) {
        data.label_mapping.emplace_back(label, row.label);
        std::ostringstream os;
        os.precision(17);
        os << "line " << lineno << ": label " << label << " mapped to " << row.label;
        data.warnings.push_back(os.str());
      }
    }

    std::size_t previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto [tok, col] = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected index:value, got '" + std::string(tok) + "'", lineno, col);
      long long index = 0;
      if (!parse_index(tok.substr(0, colon), index))
        throw ParseError("malformed index in '" + std::string(tok) + "'", lineno, col);
      if (index < 1) throw ParseError("feature index must be >= 1", lineno, col);
      const auto idx = static_cast<std::size_t>(index);
      if (idx <= previous)
        throw ParseError("feature indices must be strictly increasing", lineno, col);
      double value = 0.0;
      if (!parse_double(tok.substr(colon + 1), value))
        throw ParseError("malformed value in '" + std::string(tok) + "'", lineno,
                         col + colon + 1);
      row.features.emplace_back(idx, value);
      previous = idx;
    }
    if (previous > data.dim) data.dim = previous;
    data.rows.push_back(std::move(row));
  }
  return data;
}

SparseDataset parse_libsvm_string(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

void serialize_libsvm(const SparseDataset& data, std::ostream& out) {
  std::string buf;
  for (const auto& row : data.rows) {
    buf.clear();
    buf += row.label > 0.0 ? "+1" : "-1";
    for (const auto& [j, v] : row.features) {
      buf += ' ';
      buf += std::to_string(j);
      buf += ':';
      append_double(buf, v);
    }
    buf += '\n';
    out << buf;
  }
}

std::string serialize_libsvm_string(const SparseDataset& data) {
  std::ostringstream out;
  serialize_libsvm(data, out);
  return out.str();
}

}  // namespace geopol
