#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "linenet/geometry.hpp"

namespace linenet {

struct ProcessParams {
  int d = 2;
  double gamma = 3.0;
  Ball window{origin(2), 1.0};
  double v_min = 1.0;
  std::uint64_t seed = 0;

  // Throws Error naming the violated constraint.
  void validate() const;
  // mu_d of the window hitting set.
  double window_measure() const;
  // Poisson mean of the number of lines with speed >= v hitting the window.
  double expected_count(double v) const;
};

// Speed interval [lo, hi); hi is +inf for the first layer.
struct SpeedLayer {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lo && v < hi; }
};

struct LineSample {
  ProcessParams params;
  std::vector<MarkedLine> lines;
  std::vector<int> line_layer;  // parallel to lines
  std::vector<SpeedLayer> layers;

  std::size_t size() const { return lines.size(); }
};

inline constexpr double kMaxExpectedLines = 1e8;

class Stream;

// One line from the normalized invariant measure on lines hitting `ball`:
// uniform direction (canonicalized), foot uniform on the normal disk of the
// ball. Draws the direction first, then the disk point.
Line random_line_hitting(Stream& rng, const Ball& ball);

// Inverse survival function of the speed law (gamma-1) v^{-gamma} on
// [v_min, inf): v_min * u^{-1/(gamma-1)}, u in (0, 1].
double pareto_speed(double u, double v_min, double gamma);

// Samples all lines hitting params.window with speed >= params.v_min.
//
// Lines are generated in the coordinate s = v^{-(gamma-1)}, where the speed
// marks form a homogeneous Poisson process of rate mu_d([window]). The s-axis
// is cut into fixed dyadic blocks; block b draws its count from the stream
// keyed (seed, b) and line j of the block from the stream keyed (seed, b, j).
// Any cutoff therefore selects a fixed subset of one infinite realization,
// which is what makes refine() a coupling.
LineSample sample_process(const ProcessParams& params);

// Adds the layer [v_min_new, v_min) to the sample. Existing lines are kept in
// place; new lines are appended in block order.
LineSample refine(const LineSample& sample, double v_min_new);

struct FastLineCount {
  std::size_t count = 0;
  // Ball reaches outside the window, so lines missing the window but hitting
  // the ball were never sampled.
  bool censored = false;
};

FastLineCount count_fast_lines(const LineSample& sample, double v0, const Ball& ball);

// Comma-delimited text, 17 significant digits.
void write_sample(std::ostream& out, const LineSample& sample);
LineSample read_sample(std::istream& in);

}  // namespace linenet
