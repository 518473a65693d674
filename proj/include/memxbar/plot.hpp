#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace memxbar {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal SVG line chart, derived only from already-computed CSV data.
void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

}  // namespace memxbar
