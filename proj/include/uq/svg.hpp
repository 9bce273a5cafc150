#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uq/effectiveness.hpp"

namespace uq::svg {

struct Series {
  std::string name;
  std::vector<CurvePoint> points;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

std::string line_chart(const Axes& axes, const std::vector<Series>& series);

// Square matrix of values in [-1, 1]; absent cells are drawn hatched grey.
std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<std::optional<double>>>& values);

struct BoxGroup {
  std::string name;
  std::vector<double> values;
};

std::string box_plot(const std::string& title, const std::string& y_label,
                     const std::vector<BoxGroup>& groups);

// Linear-interpolated quantile of sorted data, q in [0,1].
double quantile(const std::vector<double>& sorted, double q);

}  // namespace uq::svg
