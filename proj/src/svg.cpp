#include "rattlesim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rattlesim/core.hpp"

namespace rattlesim::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

struct Frame {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
  void pad() {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
  }
};

std::string header(const std::string& title, const Frame& f, const std::string& y_note) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n"
     << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 15 << "\" font-size=\"10\">"
     << f.x0 << "</text>\n"
     << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 15
     << "\" font-size=\"10\" text-anchor=\"end\">" << f.x1 << "</text>\n"
     << "<text x=\"5\" y=\"" << kHeight - kMargin << "\" font-size=\"10\">" << y_note << f.y0
     << "</text>\n"
     << "<text x=\"5\" y=\"" << kMargin + 10 << "\" font-size=\"10\">" << y_note << f.y1
     << "</text>\n";
  return os.str();
}

}  // namespace

std::string line_chart(const std::string& title, const std::vector<Line>& lines, bool log_y) {
  auto tf = [log_y](double y) { return log_y ? std::log10(y) : y; };
  Frame f{kInf, -kInf, kInf, -kInf};
  for (const auto& l : lines) {
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (!l.y[i] || (log_y && !(*l.y[i] > 0.0))) continue;
      f.x0 = std::min(f.x0, l.x[i]);
      f.x1 = std::max(f.x1, l.x[i]);
      f.y0 = std::min(f.y0, tf(*l.y[i]));
      f.y1 = std::max(f.y1, tf(*l.y[i]));
    }
  }
  if (!std::isfinite(f.x0)) f = Frame{};
  f.pad();

  std::ostringstream os;
  os << header(title, f, log_y ? "log10 " : "");
  double legend_y = kMargin + 15;
  for (const auto& l : lines) {
    os << "<path fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1\""
       << (l.dashed ? " stroke-dasharray=\"5,3\"" : "") << " d=\"";
    bool pen_down = false;
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (!l.y[i] || (log_y && !(*l.y[i] > 0.0))) {
        pen_down = false;
        continue;
      }
      os << (pen_down ? 'L' : 'M') << f.px(l.x[i]) << ',' << f.py(tf(*l.y[i])) << ' ';
      pen_down = true;
    }
    os << "\"/>\n";
    os << "<text x=\"" << kWidth - kMargin - 5 << "\" y=\"" << legend_y
       << "\" font-size=\"10\" text-anchor=\"end\" fill=\"" << l.color << "\">" << l.label
       << "</text>\n";
    legend_y += 12;
  }
  os << "</svg>\n";
  return os.str();
}

std::string bar_chart(const std::string& title, const std::vector<Bar>& bars) {
  Frame f{kInf, -kInf, 0.0, 0.0};
  for (const auto& b : bars) {
    f.x0 = std::min(f.x0, b.start);
    f.x1 = std::max(f.x1, b.end);
    f.y1 = std::max(f.y1, b.height);
  }
  if (!std::isfinite(f.x0)) f = Frame{};
  f.pad();
  std::ostringstream os;
  os << header(title, f, "");
  for (const auto& b : bars) {
    const double top = f.py(b.height);
    os << "<rect x=\"" << f.px(b.start) << "\" y=\"" << top << "\" width=\""
       << std::max(0.0, f.px(b.end) - f.px(b.start)) << "\" height=\"" << f.py(0.0) - top
       << "\" fill=\"#888\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write(const std::filesystem::path& file, const std::string& svg) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  out << svg;
}

}  // namespace rattlesim::svg
