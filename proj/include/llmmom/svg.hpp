#pragma once

#include <string>
#include <vector>

namespace llmmom::svg {

struct Series {
  std::string name;
  std::vector<double> values;
};

/// Line chart of one or more series sharing an x axis of `labels`
/// (only the first and last labels are printed).
std::string line_chart(const std::string& title, const std::vector<std::string>& labels,
                       const std::vector<Series>& series);

/// Vertical bar chart. With more than one series the bars are grouped.
std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<Series>& series);

void write(const std::string& svg, const std::string& path);

}  // namespace llmmom::svg
