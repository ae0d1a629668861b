#pragma once

// Minimal SVG line and bar charts for eyeballing experiment output.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rattlesim::svg {

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<std::optional<double>> y;  // gaps at nullopt
  std::string color = "#1f77b4";
  bool dashed = false;
};

std::string line_chart(const std::string& title, const std::vector<Line>& lines,
                       bool log_y = false);

struct Bar {
  double start;
  double end;
  double height;
};

std::string bar_chart(const std::string& title, const std::vector<Bar>& bars);

void write(const std::filesystem::path& file, const std::string& svg);

}  // namespace rattlesim::svg
