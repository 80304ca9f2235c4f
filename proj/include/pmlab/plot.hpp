#pragma once

#include <string>
#include <vector>

#include "pmlab/experiment.hpp"

namespace pmlab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool steps = false;  // draw as a step function (vertical segments at jumps)
};

/// Minimal line chart written as standalone SVG.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
  std::vector<std::pair<std::string, double>> hlines;
};

std::string render_svg(const Chart& chart);

/// Writes energy.svg, and when minimizers are given also minimizer.svg and
/// blowup.svg (smallest eps, first center). Returns the written paths.
std::vector<std::string> emit_plots(const ExperimentConfig& cfg,
                                    const std::vector<SweepRecord>& records,
                                    const std::vector<SampledFunction>& minimizers,
                                    const std::string& dir);

}  // namespace pmlab
