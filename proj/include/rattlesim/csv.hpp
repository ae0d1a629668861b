#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rattlesim/core.hpp"

namespace rattlesim::csv {

/// Comma-separated cell: a number, a missing value (empty), or raw text.
class Cell {
 public:
  Cell(double v) : text_(format_cell(v)) {}                       // NOLINT
  Cell(std::optional<double> v) : text_(v ? format_cell(*v) : "") {}  // NOLINT
  Cell(std::size_t v) : text_(std::to_string(v)) {}               // NOLINT
  Cell(int v) : text_(std::to_string(v)) {}                       // NOLINT
  Cell(std::string s) : text_(std::move(s)) {}                    // NOLINT
  Cell(const char* s) : text_(s) {}                               // NOLINT

  const std::string& text() const { return text_; }

 private:
  static std::string format_cell(double v);
  std::string text_;
};

/// LF-terminated CSV file with a mandatory header row.
class Writer {
 public:
  Writer(const std::filesystem::path& file, const std::vector<std::string>& header);

  void row(const std::vector<Cell>& cells);

 private:
  std::filesystem::path file_;
  std::ofstream out_;
  std::size_t columns_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws Error if absent.
  std::size_t column(const std::string& name) const;
  /// Numeric cell; nullopt for an empty cell, Error for unparsable text.
  std::optional<double> number(std::size_t row, std::size_t col) const;
};

Table read(const std::filesystem::path& file);

}  // namespace rattlesim::csv
