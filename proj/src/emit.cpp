#include "curvecert/emit.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curvecert {

namespace {

std::string num17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void emit_trajectory(const SampledCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  out << "t";
  for (int k = 0; k < curve.dim(); ++k) {
    out << ",x_" << k;
  }
  out << "\n";
  for (int i = 0; i < curve.n_nodes(); ++i) {
    out << num17(curve.grid().node(i));
    for (double c : curve.value(i)) {
      out << "," << num17(c);
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

void emit_trajectory(const ManifoldTrajectory& traj, const Atlas& atlas,
                     const std::string& path) {
  if (traj.segments.empty()) {
    throw DomainError("cannot emit an empty trajectory");
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  const int local_dim = traj.segments.front().curve.dim();
  const int ambient_dim =
      atlas.chart(traj.segments.front().chart_id).ambient_dim;
  out << "t,chart_id";
  for (int k = 0; k < local_dim; ++k) {
    out << ",x_" << k;
  }
  for (int k = 0; k < ambient_dim; ++k) {
    out << ",amb_" << k;
  }
  out << "\n";
  for (const auto& seg : traj.segments) {
    const Chart& chart = atlas.chart(seg.chart_id);
    for (int i = 0; i < seg.curve.n_nodes(); ++i) {
      out << num17(seg.curve.grid().node(i)) << "," << seg.chart_id;
      const Vec& z = seg.curve.value(i);
      for (double c : z) {
        out << "," << num17(c);
      }
      for (double c : chart.from_local(z)) {
        out << "," << num17(c);
      }
      out << "\n";
    }
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::pair<std::vector<double>, std::vector<Vec>> read_trajectory(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open trajectory file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("trajectory file is empty: " + path);
  }
  std::vector<double> times;
  std::vector<Vec> values;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    Vec v;
    bool first = true;
    double t = 0.0;
    while (std::getline(row, cell, ',')) {
      double x = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (res.ec != std::errc{}) {
        throw ParseError("bad numeric cell '" + cell + "' in " + path, 0);
      }
      if (first) {
        t = x;
        first = false;
      } else {
        v.push_back(x);
      }
    }
    times.push_back(t);
    values.push_back(std::move(v));
  }
  return {std::move(times), std::move(values)};
}

}  // namespace curvecert
