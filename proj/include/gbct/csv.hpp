#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"

namespace gbct {

namespace csv_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

inline std::string where(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

// std::from_chars is locale-independent: only '.' is accepted as the decimal separator.
inline double parse_real(std::string_view cell, std::size_t row, std::size_t col) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("non-numeric cell '" + std::string(cell) + "' at " + where(row, col));
  if (!std::isfinite(v)) throw ParseError("non-finite value at " + where(row, col));
  return v;
}

inline int parse_label(std::string_view cell, std::size_t row, std::size_t col) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("non-integer label '" + std::string(cell) + "' at " + where(row, col));
  return v;
}

// Calls fn(row_number, cells) for every non-blank data line. Row numbers are
// 1-based physical line numbers.
template <typename Fn>
void for_each_row(const std::string& path, bool has_header, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  std::size_t row = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    fn(row, split(line));
  }
  if (in.bad()) throw IoError("read error on '" + path + "'");
}

}  // namespace csv_detail

/// Reads a comma-separated numeric table. When `label_col` is given that
/// column is parsed as integer class ids and removed from the features.
inline Dataset load_csv(const std::string& path, bool has_header = false,
                        std::optional<std::size_t> label_col = std::nullopt) {
  std::vector<double> coords;
  std::vector<int> labels;
  std::size_t width = 0;
  csv_detail::for_each_row(path, has_header, [&](std::size_t row, const auto& cells) {
    if (width == 0) {
      width = cells.size();
      if (label_col && *label_col >= width)
        throw InvalidArgument("label column " + std::to_string(*label_col) +
                              " out of range for " + std::to_string(width) + " columns");
      if (label_col && width == 1)
        throw ParseError("no feature columns left after removing the label column");
    } else if (cells.size() != width) {
      throw ParseError("ragged row " + std::to_string(row) + ": expected " +
                       std::to_string(width) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_col && c == *label_col)
        labels.push_back(csv_detail::parse_label(cells[c], row, c));
      else
        coords.push_back(csv_detail::parse_real(cells[c], row, c));
    }
  });
  if (width == 0) throw ParseError("'" + path + "' contains no data rows");
  const std::size_t dim = label_col ? width - 1 : width;
  if (label_col) return Dataset(dim, std::move(coords), std::move(labels));
  return Dataset(dim, std::move(coords));
}

/// Reads one integer label per row from column `col`.
inline std::vector<int> load_labels_csv(const std::string& path, bool has_header = false,
                                        std::size_t col = 0) {
  std::vector<int> labels;
  csv_detail::for_each_row(path, has_header, [&](std::size_t row, const auto& cells) {
    if (col >= cells.size())
      throw InvalidArgument("label column " + std::to_string(col) + " out of range at row " +
                            std::to_string(row));
    labels.push_back(csv_detail::parse_label(cells[col], row, col));
  });
  return labels;
}

inline void save_labels_csv(const std::string& path, const std::vector<int>& labels) {
  if (labels.empty()) throw InvalidArgument("refusing to write an empty label file");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (int l : labels) out << l << '\n';
  if (!out) throw IoError("write error on '" + path + "'");
}

/// Writes features (shortest round-trip representation) and, if present, the
/// labels as a trailing column. No header row.
inline void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.imbue(std::locale::classic());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto p = ds.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) out << ',';
      out << p[k];
    }
    if (ds.has_labels()) out << ',' << (*ds.labels())[i];
    out << '\n';
  }
  if (!out) throw IoError("write error on '" + path + "'");
}

}  // namespace gbct
