#pragma once

#include <string>
#include <vector>

#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

/// Cell grid coloured from white (lo) to dark blue (hi), value printed in each cell.
/// NaN cells are grey and labelled "n/a".
std::string heatmap_svg(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Matrix& values, double lo = 0.0,
                        double hi = 1.0);

struct SvgSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> errors;  // optional, +- bars
};

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series);

}  // namespace gnnsteal
