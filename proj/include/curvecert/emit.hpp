#pragma once

#include <string>
#include <utility>
#include <vector>

#include "curvecert/core_types.hpp"
#include "curvecert/manifold.hpp"

namespace curvecert {

// Comma-separated table with a header row; columns t, x_0..x_{d-1}. Values
// are printed with 17 significant digits so re-parsing is bit-exact.
void emit_trajectory(const SampledCurve& curve, const std::string& path);

// Manifold variant: columns t, chart_id, x_0..x_{d-1}, amb_0..amb_{m-1}.
// Segment boundary nodes appear once per segment, so the chart_id column
// changes exactly at chart switches.
void emit_trajectory(const ManifoldTrajectory& traj, const Atlas& atlas,
                     const std::string& path);

// Reads back a plain trajectory table: (times, values per node).
std::pair<std::vector<double>, std::vector<Vec>> read_trajectory(
    const std::string& path);

}  // namespace curvecert
