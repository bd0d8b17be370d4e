#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "priorshift/datagen.hpp"
#include "priorshift/errors.hpp"
#include "priorshift/sample.hpp"

namespace priorshift {

// File format: UTF-8, comma separated, mandatory header row, '.' decimal
// point, no quoting. The label column is addressed by header name.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline double parse_number(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || end != begin + cell.size()) {
    throw ParseError("expected a numeric value, got '" + cell + "'", line_no);
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite value '" + cell + "'", line_no);
  }
  return v;
}

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // raw cells, one entry per data line
};

inline RawCsv read_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (line_no == 1) {
      raw.header = std::move(cells);
      continue;
    }
    if (cells.size() != raw.header.size()) {
      throw ParseError("expected " + std::to_string(raw.header.size()) +
                           " columns, got " + std::to_string(cells.size()),
                       line_no);
    }
    raw.rows.push_back(std::move(cells));
  }
  if (raw.header.empty()) throw ParseError("missing header row in " + path, 1);
  if (raw.rows.empty()) throw InputError("no data rows in " + path);
  return raw;
}

}  // namespace detail

// Feature-only CSV: every column numeric.
inline Eigen::MatrixXd load_feature_csv(const std::string& path) {
  const auto raw = detail::read_raw_csv(path);
  const auto p = static_cast<Eigen::Index>(raw.header.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(raw.rows.size()), p);
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(static_cast<Eigen::Index>(i), j) =
          detail::parse_number(raw.rows[i][static_cast<std::size_t>(j)], i + 2);
    }
  }
  return m;
}

// Labeled CSV: the named column holds the class token; cells equal to
// positive_value map to +1, everything else to -1.
inline LabeledDataset load_labeled_csv(const std::string& path,
                                       const std::string& label_column,
                                       const std::string& positive_value) {
  const auto raw = detail::read_raw_csv(path);

  std::ptrdiff_t label_idx = -1;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    if (raw.header[j] == label_column) {
      label_idx = static_cast<std::ptrdiff_t>(j);
      break;
    }
  }
  if (label_idx < 0) {
    std::string available;
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
      if (j) available += ", ";
      available += raw.header[j];
    }
    throw InputError("label column '" + label_column + "' not found in " + path +
                     "; available columns: " + available);
  }

  const auto p = static_cast<Eigen::Index>(raw.header.size()) - 1;
  if (p < 1) throw InputError("no feature columns besides the label in " + path);

  LabeledDataset data;
  data.features.resize(static_cast<Eigen::Index>(raw.rows.size()), p);
  data.labels.reserve(raw.rows.size());
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == label_idx) continue;
      data.features(static_cast<Eigen::Index>(i), col++) =
          detail::parse_number(raw.rows[i][j], i + 2);
    }
    data.labels.push_back(raw.rows[i][static_cast<std::size_t>(label_idx)] ==
                                  positive_value
                              ? 1
                              : -1);
  }
  return data;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Shortest representation that parses back to the same double.
inline std::string format_double_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_feature_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out << ',';
    out << 'f' << (j + 1);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double_exact(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace priorshift
