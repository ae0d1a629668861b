#include "rattlesim/csv.hpp"

#include <sstream>

#include "rattlesim/format.hpp"

namespace rattlesim::csv {

std::string Cell::format_cell(double v) { return format_number(v); }

Writer::Writer(const std::filesystem::path& file, const std::vector<std::string>& header)
    : file_(file), out_(file, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + file.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) {
    throw Error(file_.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i].text();
  out_ << '\n';
  if (!out_) throw Error("write failed for " + file_.string());
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error("no column '" + name + "'");
}

std::optional<double> Table::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  if (s.empty()) return std::nullopt;
  auto v = parse_number(s);
  if (!v) throw Error("not a number: '" + s + "'");
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Table read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(file.string() + ": missing header");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) {
      throw Error(file.string() + ": ragged row " + std::to_string(t.rows.size() + 2));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace rattlesim::csv
