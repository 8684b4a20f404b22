#pragma once

#include <string>
#include <vector>

namespace crashforge::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Scatter with an identity diagonal and a corner annotation; the parity
// plot used for true-vs-predicted comparisons.
std::string parity_plot(const std::string& title, const Series& points,
                        const std::string& annotation);

// Horizontal bar chart (one bar per label), values expected in [0,1].
std::string bar_chart(const std::string& title,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values);

// Multi-series line plot against a shared x axis.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::vector<Series>& series);

// Complexity/error front: line plot with point markers.
std::string front_plot(const std::string& title, const Series& front);

}  // namespace crashforge::svg
