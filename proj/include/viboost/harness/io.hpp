#pragma once

// Dataset files.
//
// Dense CSV: one example per line, comma-separated real features, label in the
// last column ({-1,+1}, or {0,1} with 0 mapped to -1). Lines starting with '#'
// and blank lines are skipped; an optional header row can be skipped by flag.
//
// Sparse binary: "label idx idx ..." with 1-based feature indices; a listed
// index is present (+1), everything else absent (-1).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/hypotheses.hpp"

namespace viboost::harness {

inline constexpr std::string_view kFormatTag = "# viboost-lab v1";

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline int parse_label(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  if (!parse_double(text, v)) {
    throw ParseError("line " + std::to_string(line_no) + ": label '" + std::string(trim(text)) +
                     "' is not numeric");
  }
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;
  throw ParseError("line " + std::to_string(line_no) + ": label must be -1, 0 or +1");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline Dataset read_dense_csv(std::istream& in, bool has_header = false) {
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t cols = 0;
  bool cols_known = false;
  bool header_pending = has_header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = body.find(',', start);
      cells.push_back(body.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) + ": need at least one feature and a label");
    }
    if (!cols_known) {
      cols = cells.size() - 1;
      cols_known = true;
    } else if (cells.size() - 1 != cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols + 1) +
                       " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                         ": '" + std::string(detail::trim(cells[c])) + "' is not a number");
      }
      features.push_back(v);
    }
    labels.push_back(detail::parse_label(cells.back(), line_no));
  }
  if (labels.empty()) throw ParseError("dense CSV contains no examples");
  const std::size_t rows = labels.size();
  return Dataset(rows, cols, std::move(features), std::move(labels));
}

inline Dataset load_dense_csv(const std::string& path, bool has_header = false) {
  auto in = detail::open_input(path);
  return read_dense_csv(in, has_header);
}

inline Dataset read_sparse_binary(std::istream& in) {
  std::vector<std::set<std::size_t>> present;
  std::vector<int> labels;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream tokens{std::string(body)};
    std::string tok;
    tokens >> tok;
    labels.push_back(detail::parse_label(tok, line_no));
    std::set<std::size_t> idx;
    while (tokens >> tok) {
      double v = 0.0;
      if (!detail::parse_double(tok, v) || v < 1.0 || v != std::floor(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + tok +
                         "' is not a 1-based feature index");
      }
      const auto i = static_cast<std::size_t>(v);
      idx.insert(i);
      dim = std::max(dim, i);
    }
    present.push_back(std::move(idx));
  }
  if (labels.empty()) throw ParseError("sparse file contains no examples");
  const std::size_t rows = labels.size();
  std::vector<double> features(rows * dim, -1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i : present[r]) features[r * dim + (i - 1)] = 1.0;
  }
  return Dataset(rows, dim, std::move(features), std::move(labels));
}

inline Dataset load_sparse_binary(const std::string& path) {
  auto in = detail::open_input(path);
  return read_sparse_binary(in);
}

inline void write_dense_csv(std::ostream& os, const Dataset& data) {
  os << kFormatTag << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t n = 0; n < data.rows(); ++n) {
    for (std::size_t d = 0; d < data.cols(); ++d) os << data.at(n, d) << ',';
    os << (data.label(n) == 1 ? "+1" : "-1") << '\n';
  }
  os.precision(old_precision);
}

inline void save_dense_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_dense_csv(out, data);
}

}  // namespace viboost::harness
